#include <doctest.h>

#include <random>

#include "test_util.hpp"
#include "vlp/decision.hpp"

using namespace vlp;
using vlp_test::FnBackend;

namespace {

const PromptTemplates kPrompts = PromptTemplates::defaults();

NormalizedInput mcq_input(int n_frames = 4) {
  std::vector<Frame> frames;
  for (int i = 0; i < n_frames; ++i)
    frames.push_back(Frame{"orig/" + std::to_string(i) + ".jpg", i, Provenance::original, {}});
  Query q;
  q.text = "What will the person do next?";
  q.options = std::vector<std::string>{"Eat the sandwich.", "Open the door.", "Sit on the sofa.",
                                       "Take the paper."};
  return NormalizedInput{FrameSet::of(std::move(frames)), q, SynthesizedSide::none};
}

VisionPlan plan_with_generated() {
  VisionPlan plan;
  plan.cs_decision = CsDecision::future_relevant;
  for (int i = 0; i < 4; ++i)
    plan.frames.push_back(Frame{"orig/" + std::to_string(i) + ".jpg", i, Provenance::original, {}});
  plan.frames.push_back(Frame{"gen/0.jpg", 4, Provenance::generated, "gen"});
  plan.scores.assign(5, 1.0);
  return plan;
}

LanguagePlan three_steps() {
  return LanguagePlan{{"What is the person holding?", "What is nearby?", "What usually follows?"},
                      "What will the person do next?",
                      "raw"};
}

}  // namespace

TEST_CASE("parse_choice strategy ladder") {
  const std::vector<std::string> options = {"Eat the sandwich.", "Open the door.",
                                            "Sit on the sofa.", "Took the paper."};
  CHECK(parse_choice("(b)", options) == 1);
  CHECK(parse_choice("(B) open the door", options) == 1);
  CHECK(parse_choice("C. Sit on the sofa", options) == 2);
  CHECK(parse_choice("b", options) == 1);
  CHECK(parse_choice("I think the answer is open the door.", options) == 1);
  CHECK(parse_choice("The person will take the paper.", options) == 3);  // overlap 2/3 >= 0.6
  CHECK_FALSE(parse_choice("none of these", options).has_value());
  CHECK_FALSE(parse_choice("(F) not an option", options).has_value());
  CHECK_THROWS(parse_choice("x", {}));
}

TEST_CASE("vanilla_answer parses MCQ replies and records one round") {
  FnBackend lmm("lmm", [](const BackendRequest& req) {
    CHECK(req.concatenated_text().find("Answer with the letter") != std::string::npos);
    return vlp_test::text_response("(B) open the door");
  });
  Trace trace;
  const Answer a = vanilla_answer(mcq_input(), lmm, kPrompts, 4, &trace);
  CHECK(a.option_index == 1);
  CHECK(a.stage == Stage::vanilla);
  CHECK(trace.rounds.size() == 1);
  CHECK(trace.rounds[0].stage == "vanilla");
  CHECK(trace.rounds[0].frame_indices == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("vanilla_answer caps frames at the budget, uniformly spaced") {
  std::vector<int> seen;
  FnBackend lmm("lmm", [&seen](const BackendRequest& req) {
    for (const auto& part : req.messages[0].parts)
      if (part.image_ref) seen.push_back(1);
    return vlp_test::text_response("(A)");
  });
  const Answer a = vanilla_answer(mcq_input(9), lmm, kPrompts, 4, nullptr);
  CHECK(a.option_index == 0);
  CHECK(seen.size() == 4);
}

TEST_CASE("vanilla_answer abstains on unparseable MCQ replies") {
  FnBackend lmm("lmm", [](const BackendRequest&) {
    return vlp_test::text_response("Interesting scene, lots of furniture.");
  });
  const Answer a = vanilla_answer(mcq_input(), lmm, kPrompts, 4, nullptr);
  CHECK_FALSE(a.option_index.has_value());
  CHECK_FALSE(a.text.empty());
}

TEST_CASE("vanilla_answer leaves option_index absent for open-ended queries") {
  FnBackend lmm("lmm", [](const BackendRequest&) {
    return vlp_test::text_response("The car merges right onto the highway.");
  });
  NormalizedInput input = mcq_input();
  input.language.options.reset();
  const Answer a = vanilla_answer(input, lmm, kPrompts, 4, nullptr);
  CHECK_FALSE(a.option_index.has_value());
  CHECK(a.text == "The car merges right onto the highway.");
}

TEST_CASE("language_answer runs one growing conversation, steps+1 calls") {
  std::vector<size_t> message_counts;
  FnBackend lmm("lmm", [&message_counts](const BackendRequest& req) {
    message_counts.push_back(req.messages.size());
    if (req.concatenated_text().find("Based on the answers of all steps") != std::string::npos)
      return vlp_test::text_response("(D) Take the paper.");
    if (req.concatenated_text().find("puts the plate down") != std::string::npos)
      return vlp_test::text_response("He reaches toward the shelf.");
    return vlp_test::text_response("He puts the plate down before taking the book.");
  });

  Trace trace;
  const Answer a = language_answer(mcq_input(), three_steps(), lmm, kPrompts, 4, &trace);
  CHECK(lmm.calls() == 4);
  CHECK(message_counts == std::vector<size_t>{1, 3, 5, 7});  // growing dialogue
  CHECK(a.option_index == 3);
  REQUIRE(a.sub_answers.has_value());
  CHECK(a.sub_answers->size() == 3);
  CHECK((*a.sub_answers)[0].find("plate") != std::string::npos);
  CHECK(trace.rounds.size() == 4);
  CHECK(trace.rounds[3].stage == "language_final");
}

TEST_CASE("language_answer with a single step makes two calls") {
  FnBackend lmm("lmm", [](const BackendRequest&) { return vlp_test::text_response("(A)"); });
  LanguagePlan plan{{"only step?"}, "q", "raw"};
  language_answer(mcq_input(), plan, lmm, kPrompts, 4, nullptr);
  CHECK(lmm.calls() == 2);
}

TEST_CASE("vision_answer labels current and possible future frames") {
  std::string seen;
  FnBackend lmm("lmm", [&seen](const BackendRequest& req) {
    seen = req.concatenated_text();
    return vlp_test::text_response("(C) remain stationary");
  });

  Query q;
  q.text = "What should the car do?";
  q.options = std::vector<std::string>{"Accelerate.", "Turn left.", "Remain stationary."};
  const Answer a = vision_answer(plan_with_generated(), q, lmm, kPrompts, nullptr);
  CHECK(a.option_index == 2);
  CHECK(seen.find("Current frames:") != std::string::npos);
  CHECK(seen.find("Possible future frames:") != std::string::npos);
  CHECK(seen.find("gen/0.jpg") != std::string::npos);

  // plan without generated frames: no future section
  VisionPlan originals_only = plan_with_generated();
  originals_only.frames.pop_back();
  originals_only.scores.pop_back();
  originals_only.cs_decision = CsDecision::not_future_relevant;
  vision_answer(originals_only, q, lmm, kPrompts, nullptr);
  CHECK(seen.find("Possible future frames:") == std::string::npos);

  VisionPlan empty;
  CHECK_THROWS(vision_answer(empty, q, lmm, kPrompts, nullptr));
}

TEST_CASE("vote: agreement short-circuits without a backend call") {
  FnBackend lmm("lmm", [](const BackendRequest&) { return vlp_test::text_response("1"); });
  Query q = mcq_input().language;

  Answer a;
  a.text = "(B) open the door";
  a.option_index = 1;
  a.stage = Stage::vanilla;
  Answer b = a;
  b.stage = Stage::vision;

  const Answer voted = vote(a, b, q, lmm, kPrompts, Stage::voted_vision);
  CHECK(voted.stage == Stage::voted_vision);
  CHECK(voted.option_index == 1);
  CHECK(lmm.calls() == 0);

  // strict mode forces the call even on agreement
  vote(a, b, q, lmm, kPrompts, Stage::voted_vision, /*strict=*/true);
  CHECK(lmm.calls() == 1);
}

TEST_CASE("vote: endorsement picks the candidate, garbage falls back to the first") {
  Query q = mcq_input().language;
  Answer a;
  a.text = "(A) eat the sandwich";
  a.option_index = 0;
  Answer b;
  b.text = "(B) open the door";
  b.option_index = 1;

  FnBackend two("lmm", [](const BackendRequest& req) {
    CHECK(req.concatenated_text().find("Candidate 1: (A) eat the sandwich") != std::string::npos);
    CHECK(req.concatenated_text().find("Which answer is more valid? Reply 1 or 2.") !=
          std::string::npos);
    return vlp_test::text_response("2");
  });
  CHECK(vote(a, b, q, two, kPrompts, Stage::voted_vision).option_index == 1);

  FnBackend worded("lmm",
                   [](const BackendRequest&) { return vlp_test::text_response("Candidate 2 is more valid."); });
  CHECK(vote(a, b, q, worded, kPrompts, Stage::voted_vision).option_index == 1);

  FnBackend garbage("lmm",
                    [](const BackendRequest&) { return vlp_test::text_response("Neither seems right."); });
  const Answer fallback = vote(a, b, q, garbage, kPrompts, Stage::voted_vision);
  CHECK(fallback.option_index == 0);
  CHECK(fallback.text == a.text);
}

namespace {

// LMM whose vanilla/language/vision answers and vote outcomes are scripted.
FnBackend scripted_lmm(std::string vanilla, std::string language, std::string vision,
                       std::string vote_reply) {
  return FnBackend("lmm", [=](const BackendRequest& req) {
    const std::string text = req.concatenated_text();
    if (text.find("Which answer is more valid?") != std::string::npos)
      return vlp_test::text_response(vote_reply);
    if (text.find("Based on the answers of all steps") != std::string::npos)
      return vlp_test::text_response(language);
    if (text.find("Current frames:") != std::string::npos)
      return vlp_test::text_response(vision);
    if (text.find("Answer with the letter") != std::string::npos)
      return vlp_test::text_response(vanilla);
    return vlp_test::text_response("step answer");
  });
}

}  // namespace

TEST_CASE("decide: full protocol call count with disagreements is 9") {
  FnBackend lmm = scripted_lmm("(A) Eat the sandwich.", "(B) Open the door.",
                               "(C) Sit on the sofa.", "2");
  DecisionConfig cfg;
  Trace trace;
  const DecisionOutcome out =
      decide(mcq_input(), plan_with_generated(), three_steps(), cfg, lmm, kPrompts, &trace);
  // 1 vanilla + 4 language + 1 vision + 3 votes
  CHECK(lmm.calls() == 9);
  CHECK(out.answers.count("vanilla") == 1);
  CHECK(out.answers.count("language") == 1);
  CHECK(out.answers.count("vision") == 1);
  CHECK(out.answers.count("voted_language") == 1);
  CHECK(out.answers.count("voted_vision") == 1);
  CHECK(out.answers.count("final") == 1);
  // every vote endorsed candidate 2: language beats vanilla, vision beats
  // vanilla, vision beats language
  CHECK(out.final.option_index == 2);
}

TEST_CASE("decide: full agreement short-circuits every vote") {
  FnBackend lmm = scripted_lmm("(C) Sit on the sofa.", "(C) Sit on the sofa.",
                               "(C) Sit on the sofa.", "unused");
  DecisionConfig cfg;
  const DecisionOutcome out =
      decide(mcq_input(), plan_with_generated(), three_steps(), cfg, lmm, kPrompts, nullptr);
  CHECK(lmm.calls() == 6);  // 1 + 4 + 1, zero votes
  CHECK(out.final.option_index == 2);
}

TEST_CASE("decide: ablations remove exactly their calls") {
  DecisionConfig cfg;

  SUBCASE("vp only: vanilla + vision + 1 vote") {
    cfg.enable_lp = false;
    FnBackend lmm = scripted_lmm("(A) Eat the sandwich.", "x", "(B) Open the door.", "2");
    const DecisionOutcome out =
        decide(mcq_input(), plan_with_generated(), std::nullopt, cfg, lmm, kPrompts, nullptr);
    CHECK(lmm.calls() == 3);
    CHECK(out.final.option_index == 1);  // final = voted_vision
    CHECK(out.answers.count("voted_vision") == 1);
    CHECK(out.answers.count("voted_language") == 0);
  }

  SUBCASE("lp only: vanilla + language + 1 vote") {
    cfg.enable_vp = false;
    FnBackend lmm = scripted_lmm("(A) Eat the sandwich.", "(D) Take the paper.", "x", "2");
    const DecisionOutcome out =
        decide(mcq_input(), std::nullopt, three_steps(), cfg, lmm, kPrompts, nullptr);
    CHECK(lmm.calls() == 6);  // 1 + 4 + 1 vote
    CHECK(out.final.option_index == 3);
  }

  SUBCASE("voting off, lp only: final is the language answer") {
    cfg.enable_vp = false;
    cfg.enable_voting = false;
    FnBackend lmm = scripted_lmm("(A) Eat the sandwich.", "(D) Take the paper.", "x", "never");
    const DecisionOutcome out =
        decide(mcq_input(), std::nullopt, three_steps(), cfg, lmm, kPrompts, nullptr);
    CHECK(lmm.calls() == 5);  // 1 vanilla + 4 language, zero votes
    CHECK(out.final.option_index == 3);
  }

  SUBCASE("voting off, vp only: final is the vision answer") {
    cfg.enable_lp = false;
    cfg.enable_voting = false;
    FnBackend lmm = scripted_lmm("(A) Eat the sandwich.", "x", "(B) Open the door.", "never");
    const DecisionOutcome out =
        decide(mcq_input(), plan_with_generated(), std::nullopt, cfg, lmm, kPrompts, nullptr);
    CHECK(lmm.calls() == 2);
    CHECK(out.final.option_index == 1);
  }

  SUBCASE("everything off: final = vanilla") {
    cfg.enable_vp = false;
    cfg.enable_lp = false;
    cfg.enable_voting = false;
    FnBackend lmm = scripted_lmm("(A) Eat the sandwich.", "x", "x", "never");
    const DecisionOutcome out =
        decide(mcq_input(), std::nullopt, std::nullopt, cfg, lmm, kPrompts, nullptr);
    CHECK(lmm.calls() == 1);
    CHECK(out.final.option_index == 0);
  }
}

TEST_CASE("decide: failed branch degrades to the survivor") {
  DecisionConfig cfg;
  FnBackend lmm("lmm", [](const BackendRequest& req) {
    const std::string text = req.concatenated_text();
    if (text.find("What is the person holding?") != std::string::npos)
      throw TransportError("backend down");
    if (text.find("Which answer is more valid?") != std::string::npos)
      return vlp_test::text_response("2");
    if (text.find("Current frames:") != std::string::npos)
      return vlp_test::text_response("(B) Open the door.");
    return vlp_test::text_response("(A) Eat the sandwich.");
  });

  Trace trace;
  const DecisionOutcome out =
      decide(mcq_input(), plan_with_generated(), three_steps(), cfg, lmm, kPrompts, &trace);
  CHECK(out.answers.count("language") == 0);
  CHECK(out.answers.count("vision") == 1);
  CHECK(out.final.option_index == 1);  // voted_vision wins the degraded flow
  const bool logged = std::any_of(trace.rounds.begin(), trace.rounds.end(),
                                  [](const Round& r) { return r.stage == "language_error"; });
  CHECK(logged);
}

TEST_CASE("voting soundness fuzz: final is element-identical to a stage answer") {
  std::mt19937 rng(4242);
  std::uniform_int_distribution<int> opt(0, 3);
  std::uniform_int_distribution<int> vote_die(0, 2);

  const char* letters = "ABCD";
  for (int trial = 0; trial < 300; ++trial) {
    const int vi = opt(rng), li = opt(rng), oi = opt(rng);
    const int die = vote_die(rng);
    const std::string vote_reply = die == 0 ? "1" : die == 1 ? "2" : "no idea";
    FnBackend lmm = scripted_lmm(std::string("(") + letters[vi] + ")",
                                 std::string("(") + letters[li] + ")",
                                 std::string("(") + letters[oi] + ")", vote_reply);
    DecisionConfig cfg;
    cfg.strict_voting = trial % 2 == 0;
    const DecisionOutcome out =
        decide(mcq_input(), plan_with_generated(), three_steps(), cfg, lmm, kPrompts, nullptr);
    REQUIRE(out.final.option_index.has_value());
    const int f = *out.final.option_index;
    CHECK((f == vi || f == li || f == oi));
    // the final text is byte-identical to the producing stage answer
    const std::string expect = std::string("(") + letters[f] + ")";
    CHECK(out.final.text == expect);
  }
}

TEST_CASE("transcript JSON is deterministic and complete") {
  FnBackend lmm = scripted_lmm("(A) Eat the sandwich.", "(B) Open the door.",
                               "(C) Sit on the sofa.", "1");
  DecisionConfig cfg;
  DecisionTranscript t;
  t.item_id = "item-1";
  t.config_snapshot = {{"vp", true}};
  const DecisionOutcome out =
      decide(mcq_input(), plan_with_generated(), three_steps(), cfg, lmm, kPrompts, &t.trace);
  t.answers = out.answers;

  const nlohmann::json j = t.to_json();
  CHECK(j.at("id") == "item-1");
  CHECK(j.at("rounds").size() == t.trace.rounds.size());
  CHECK(j.at("answers").contains("final"));
  for (const auto& [stage, answer] : t.answers) {
    if (answer.round >= 0) CHECK(answer.round < static_cast<int>(t.trace.rounds.size()));
  }
  // serialization is stable
  CHECK(j.dump(2) == t.to_json().dump(2));
}

#include "vlp/single_prompt.hpp"

TEST_CASE("single-prompt assembly folds both plans into one message") {
  const Message m = assemble_single_prompt(mcq_input(), plan_with_generated(), three_steps(),
                                           kPrompts);
  std::string text;
  int images = 0;
  for (const MessagePart& p : m.parts) {
    if (p.text) text += *p.text + "\n";
    if (p.image_ref) ++images;
  }
  CHECK(images == 5);
  CHECK(text.find("Possible future frames:") != std::string::npos);
  CHECK(text.find("1. What is the person holding?") != std::string::npos);
  CHECK(text.find("What will the person do next?") != std::string::npos);
  CHECK(text.find("Answer with the letter") != std::string::npos);
}
