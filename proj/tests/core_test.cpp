#include <doctest.h>

#include "test_util.hpp"
#include "vlp/core.hpp"

using namespace vlp;
using vlp_test::FnBackend;

namespace {

FrameSet make_frames(int n) {
  std::vector<Frame> frames;
  for (int i = 0; i < n; ++i)
    frames.push_back(Frame{"frames/" + std::to_string(i) + ".jpg", i, Provenance::original, {}});
  return FrameSet::of(std::move(frames));
}

}  // namespace

TEST_CASE("classify_task covers every modality cell") {
  CHECK(classify_task("What next?", make_frames(4)) == TaskKind::vision_language);
  CHECK(classify_task("", make_frames(8)) == TaskKind::vision_only);
  CHECK(classify_task("Describe fireworks over a city", make_frames(0)) ==
        TaskKind::language_only);
  CHECK_THROWS_AS(classify_task("", make_frames(0)), EmptyInputError);
}

TEST_CASE("FrameSet enforces invariants") {
  CHECK_THROWS(FrameSet::of({Frame{"a", 0, Provenance::original, {}},
                             Frame{"b", 0, Provenance::original, {}}}));
  CHECK_THROWS(FrameSet::of({Frame{"a", 0, Provenance::generated, {}}}));
  CHECK_THROWS(FrameSet::of({Frame{"a", 0, Provenance::original, "gen"}}));
  // sorts out-of-order input
  const FrameSet fs = FrameSet::of({Frame{"b", 3, Provenance::original, {}},
                                    Frame{"a", 1, Provenance::original, {}}});
  CHECK(fs.frames[0].temporal_index == 1);
  CHECK(fs.last_temporal_index() == 3);
}

TEST_CASE("normalize passes vision_language through with zero calls") {
  FnBackend l2v("l2v", [](const BackendRequest&) { return vlp_test::frames_response({"x"}); });
  FnBackend v2l("v2l", [](const BackendRequest&) { return vlp_test::text_response("desc"); });
  const PromptTemplates prompts = PromptTemplates::defaults();

  Query q;
  q.text = "What next?";
  const NormalizedInput out = normalize(q, make_frames(4), &l2v, &v2l, prompts);
  CHECK(out.synthesized_side == SynthesizedSide::none);
  CHECK(out.vision.size() == 4);
  CHECK(out.language.text == "What next?");
  CHECK(l2v.calls() == 0);
  CHECK(v2l.calls() == 0);
}

TEST_CASE("normalize synthesizes frames for language-only input") {
  FnBackend l2v("l2v", [](const BackendRequest& req) {
    CHECK(req.kind == RequestKind::video_gen);
    CHECK(req.params.at("n_frames") == 4);
    return vlp_test::frames_response({"g0", "g1", "g2", "g3"});
  });
  const PromptTemplates prompts = PromptTemplates::defaults();

  Query q;
  q.text = "Describe fireworks over a city";
  Trace trace;
  const NormalizedInput out = normalize(q, make_frames(0), &l2v, nullptr, prompts, {}, &trace);
  CHECK(out.synthesized_side == SynthesizedSide::vision_synthesized);
  CHECK(out.vision.size() == 4);
  CHECK(out.vision.frames[0].provenance == Provenance::original);
  CHECK(out.language.task_kind == TaskKind::language_only);
  CHECK(trace.rounds.size() == 1);
  CHECK(trace.rounds[0].stage == "l2v");
}

TEST_CASE("normalize synthesizes a description for vision-only input") {
  FnBackend v2l("v2l", [](const BackendRequest& req) {
    CHECK(req.kind == RequestKind::text_gen);
    return vlp_test::text_response("a car at an intersection");
  });
  const PromptTemplates prompts = PromptTemplates::defaults();

  Query q;
  const NormalizedInput out = normalize(q, make_frames(3), nullptr, &v2l, prompts);
  CHECK(out.synthesized_side == SynthesizedSide::language_synthesized);
  CHECK(out.language.context == "a car at an intersection");
  CHECK(out.language.language_input().find("a car at an intersection") != std::string::npos);
  CHECK(out.language.text.empty());  // T_O itself is never rewritten
  CHECK(v2l.calls() == 1);
}

TEST_CASE("normalize is idempotent with zero additional calls") {
  int l2v_calls = 0;
  FnBackend l2v("l2v", [&l2v_calls](const BackendRequest&) {
    ++l2v_calls;
    return vlp_test::frames_response({"g0", "g1"});
  });
  const PromptTemplates prompts = PromptTemplates::defaults();

  Query q;
  q.text = "write a story";
  NormalizeOptions options;
  options.l2v_frames = 2;
  const NormalizedInput once = normalize(q, make_frames(0), &l2v, nullptr, prompts, options);
  CHECK(l2v_calls == 1);
  const NormalizedInput twice = normalize(once, &l2v, nullptr, prompts, options);
  CHECK(l2v_calls == 1);
  CHECK(twice.synthesized_side == once.synthesized_side);
  CHECK(twice.vision.size() == once.vision.size());
  CHECK(twice.language.text == once.language.text);
  CHECK(twice.complete());
}

TEST_CASE("normalize raises SynthesisEmpty on empty backend output") {
  FnBackend empty_l2v("l2v", [](const BackendRequest&) {
    return vlp_test::frames_response({});
  });
  FnBackend empty_v2l("v2l", [](const BackendRequest&) { return vlp_test::text_response(""); });
  const PromptTemplates prompts = PromptTemplates::defaults();

  Query lang;
  lang.text = "hello";
  CHECK_THROWS_AS(normalize(lang, make_frames(0), &empty_l2v, nullptr, prompts),
                  SynthesisEmptyError);

  Query vis;
  CHECK_THROWS_AS(normalize(vis, make_frames(2), nullptr, &empty_v2l, prompts),
                  SynthesisEmptyError);
}

TEST_CASE("Query validation") {
  Query q;
  q.text = "pick one";
  q.options = std::vector<std::string>{"only"};
  CHECK_THROWS(q.validate());
  q.options = std::vector<std::string>{"a", "b", "c"};
  q.ground_truth = 5;
  CHECK_THROWS(q.validate());
  q.ground_truth = 2;
  CHECK_NOTHROW(q.validate());
}
