#include "vlp/decision.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>
#include <set>

namespace vlp {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::set<std::string> token_set(const std::string& s) {
  std::set<std::string> out;
  std::string current;
  for (const char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      out.insert(current);
      current.clear();
    }
  }
  if (!current.empty()) out.insert(current);
  return out;
}

// Uniformly spaced subset of at most `budget` frames.
std::vector<Frame> budget_frames(const FrameSet& input, int budget) {
  const int n = input.size();
  if (budget < 1 || n <= budget) return input.frames;
  std::vector<Frame> out;
  for (int i = 0; i < budget; ++i) {
    const int idx =
        budget == 1 ? 0
                    : static_cast<int>(std::lround(static_cast<double>(i) * (n - 1) / (budget - 1)));
    if (!out.empty() && out.back().temporal_index == input.frames[idx].temporal_index) continue;
    out.push_back(input.frames[idx]);
  }
  return out;
}

std::vector<int> indices_of(const std::vector<Frame>& frames) {
  std::vector<int> out;
  out.reserve(frames.size());
  for (const Frame& f : frames) out.push_back(f.temporal_index);
  return out;
}

Answer relabel(Answer a, Stage stage) {
  a.stage = stage;
  return a;
}

Answer abstention(Stage stage) {
  Answer a;
  a.stage = stage;
  return a;
}

nlohmann::json answer_to_json(const Answer& a) {
  nlohmann::json j;
  j["text"] = a.text;
  j["option_index"] = a.option_index ? nlohmann::json(*a.option_index) : nlohmann::json();
  j["stage"] = to_string(a.stage);
  if (a.sub_answers) j["sub_answers"] = *a.sub_answers;
  j["round"] = a.round;
  return j;
}

}  // namespace

const char* to_string(Stage s) {
  switch (s) {
    case Stage::vanilla: return "vanilla";
    case Stage::language: return "language";
    case Stage::vision: return "vision";
    case Stage::voted_language: return "voted_language";
    case Stage::voted_vision: return "voted_vision";
    case Stage::final_answer: return "final";
  }
  return "vanilla";
}

bool Answer::same_answer(const Answer& other) const {
  if (option_index && other.option_index) return *option_index == *other.option_index;
  if (!option_index && !other.option_index) return text == other.text;
  return false;
}

nlohmann::json DecisionTranscript::to_json() const {
  nlohmann::json j;
  j["id"] = item_id;
  nlohmann::json rounds = nlohmann::json::array();
  for (const Round& r : trace.rounds) {
    rounds.push_back({{"stage", r.stage},
                      {"request", r.request_digest},
                      {"response", r.response_text},
                      {"frames", r.frame_indices}});
  }
  j["rounds"] = std::move(rounds);
  nlohmann::json answers_json = nlohmann::json::object();
  for (const auto& [stage, answer] : answers) answers_json[stage] = answer_to_json(answer);
  j["answers"] = std::move(answers_json);
  j["config"] = config_snapshot;
  return j;
}

std::optional<int> parse_choice(const std::string& text, const std::vector<std::string>& options) {
  if (options.empty()) throw Error("parse_choice requires options");
  const int n = static_cast<int>(options.size());

  // Parenthesized option letter anywhere, e.g. "(b)".
  static const std::regex paren(R"(\(([A-Ea-e])\))");
  std::smatch m;
  if (std::regex_search(text, m, paren)) {
    const int idx = std::tolower(static_cast<unsigned char>(m[1].str()[0])) - 'a';
    if (idx < n) return idx;
  }

  // Leading option letter: "B", "b)", "C. ...".
  const std::string t = trim(text);
  if (!t.empty()) {
    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(t[0])));
    if (c >= 'a' && c <= 'e') {
      const bool delimited =
          t.size() == 1 || t[1] == '.' || t[1] == ')' || t[1] == ':' || t[1] == ',' ||
          std::isspace(static_cast<unsigned char>(t[1]));
      const int idx = c - 'a';
      if (delimited && idx < n) return idx;
    }
  }

  // Exact option-text containment (longest contained option wins).
  const std::string reply_lower = lower(text);
  int best_idx = -1;
  size_t best_len = 0;
  for (int i = 0; i < n; ++i) {
    const std::string opt = lower(trim(options[i]));
    if (!opt.empty() && reply_lower.find(opt) != std::string::npos && opt.size() > best_len) {
      best_idx = i;
      best_len = opt.size();
    }
  }
  if (best_idx >= 0) return best_idx;

  // Highest token overlap at ratio >= 0.6.
  const std::set<std::string> reply_tokens = token_set(text);
  double best_ratio = 0.0;
  best_idx = -1;
  for (int i = 0; i < n; ++i) {
    const std::set<std::string> opt_tokens = token_set(options[i]);
    if (opt_tokens.empty()) continue;
    size_t matched = 0;
    for (const std::string& tok : opt_tokens)
      if (reply_tokens.count(tok)) ++matched;
    const double ratio = static_cast<double>(matched) / static_cast<double>(opt_tokens.size());
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best_idx = i;
    }
  }
  if (best_ratio >= 0.6) return best_idx;
  return std::nullopt;
}

Answer vanilla_answer(const NormalizedInput& input, Backend& lmm, const PromptTemplates& prompts,
                      int frame_budget, Trace* trace) {
  const Query& query = input.language;
  const std::string prompt =
      render(prompts.answer, {{"question", question_block(prompts, query)},
                              {"options_block", options_block(prompts, query)}});

  const std::vector<Frame> frames = budget_frames(input.vision, frame_budget);
  Message m{Role::user, {}};
  for (const Frame& f : frames) m.parts.push_back(image_part(f.image_ref));
  m.parts.push_back(text_part(prompt));

  BackendRequest request;
  request.kind = RequestKind::text_gen;
  request.messages = {std::move(m)};

  const BackendResponse response = dispatch(lmm, request);
  Answer answer;
  answer.text = response.text.value_or("");
  answer.stage = Stage::vanilla;
  if (trace)
    answer.round = trace->add("vanilla", cache_key(request), answer.text, indices_of(frames));
  if (query.is_mcq()) answer.option_index = parse_choice(answer.text, *query.options);
  return answer;
}

Answer language_answer(const NormalizedInput& input, const LanguagePlan& plan, Backend& lmm,
                       const PromptTemplates& prompts, int frame_budget, Trace* trace) {
  if (plan.steps.empty()) throw Error("language_answer requires a plan with steps");
  const Query& query = input.language;
  const std::vector<Frame> frames = budget_frames(input.vision, frame_budget);
  const std::vector<int> frame_idx = indices_of(frames);

  std::vector<Message> conversation;
  std::vector<std::string> sub_answers;

  for (size_t i = 0; i < plan.steps.size(); ++i) {
    if (i == 0) {
      Message first{Role::user, {}};
      for (const Frame& f : frames) first.parts.push_back(image_part(f.image_ref));
      first.parts.push_back(text_part(context_block(query) + plan.steps[0]));
      conversation.push_back(std::move(first));
    } else {
      conversation.push_back({Role::user, {text_part(plan.steps[i])}});
    }

    BackendRequest request;
    request.kind = RequestKind::text_gen;
    request.messages = conversation;
    const BackendResponse response = dispatch(lmm, request);
    const std::string reply = response.text.value_or("");
    if (trace)
      trace->add("language_step_" + std::to_string(i + 1), cache_key(request), reply, frame_idx);
    sub_answers.push_back(reply);
    conversation.push_back({Role::assistant, {text_part(reply)}});
  }

  conversation.push_back(
      {Role::user,
       {text_part(render(prompts.language_final,
                         {{"question", question_block(prompts, query)},
                          {"options_block", options_block(prompts, query)}}))}});
  BackendRequest request;
  request.kind = RequestKind::text_gen;
  request.messages = conversation;
  const BackendResponse response = dispatch(lmm, request);

  Answer answer;
  answer.text = response.text.value_or("");
  answer.stage = Stage::language;
  answer.sub_answers = std::move(sub_answers);
  if (trace)
    answer.round = trace->add("language_final", cache_key(request), answer.text, frame_idx);
  if (query.is_mcq()) answer.option_index = parse_choice(answer.text, *query.options);
  return answer;
}

Answer vision_answer(const VisionPlan& plan, const Query& query, Backend& lmm,
                     const PromptTemplates& prompts, Trace* trace) {
  if (plan.frames.empty()) throw Error("vision_answer requires a nonempty plan");

  Message m{Role::user, {}};
  m.parts.push_back(text_part(prompts.current_frames_label));
  for (const Frame& f : plan.frames)
    if (f.provenance == Provenance::original) m.parts.push_back(image_part(f.image_ref));
  if (plan.has_generated()) {
    m.parts.push_back(text_part(prompts.future_frames_label));
    for (const Frame& f : plan.frames)
      if (f.provenance == Provenance::generated) m.parts.push_back(image_part(f.image_ref));
  }
  m.parts.push_back(
      text_part(render(prompts.answer, {{"question", question_block(prompts, query)},
                                        {"options_block", options_block(prompts, query)}})));

  BackendRequest request;
  request.kind = RequestKind::text_gen;
  request.messages = {std::move(m)};

  const BackendResponse response = dispatch(lmm, request);
  Answer answer;
  answer.text = response.text.value_or("");
  answer.stage = Stage::vision;
  if (trace)
    answer.round = trace->add("vision", cache_key(request), answer.text, plan.frame_indices());
  if (query.is_mcq()) answer.option_index = parse_choice(answer.text, *query.options);
  return answer;
}

Answer vote(const Answer& a, const Answer& b, const Query& query, Backend& lmm,
            const PromptTemplates& prompts, Stage result_stage, bool strict, Trace* trace) {
  if (!strict && a.same_answer(b)) return relabel(a, result_stage);

  BackendRequest request;
  request.kind = RequestKind::text_gen;
  request.messages = {
      {Role::user,
       {text_part(render(prompts.vote, {{"question", question_block(prompts, query)},
                                        {"candidate_1", a.text},
                                        {"candidate_2", b.text}}))}}};

  const BackendResponse response = dispatch(lmm, request);
  const std::string reply = response.text.value_or("");
  int round = -1;
  if (trace) round = trace->add(to_string(result_stage), cache_key(request), reply);

  // First 1/2 digit decides; anything else keeps the earlier-stage answer.
  const Answer* chosen = &a;
  for (const char c : reply) {
    if (c == '1') break;
    if (c == '2') {
      chosen = &b;
      break;
    }
  }
  Answer result = relabel(*chosen, result_stage);
  result.round = round;
  return result;
}

DecisionOutcome decide(const NormalizedInput& input, const std::optional<VisionPlan>& vplan,
                       const std::optional<LanguagePlan>& lplan, const DecisionConfig& config,
                       Backend& lmm, const PromptTemplates& prompts, Trace* trace) {
  DecisionOutcome out;
  const Query& query = input.language;

  std::optional<Answer> vanilla, language, vision;
  try {
    vanilla = vanilla_answer(input, lmm, prompts, config.frame_budget, trace);
    out.answers["vanilla"] = *vanilla;
  } catch (const Error& e) {
    if (trace) trace->add("vanilla_error", "", e.what());
  }

  if (config.enable_lp && lplan) {
    try {
      language = language_answer(input, *lplan, lmm, prompts, config.frame_budget, trace);
      out.answers["language"] = *language;
    } catch (const Error& e) {
      if (trace) trace->add("language_error", "", e.what());
    }
  }

  if (config.enable_vp && vplan) {
    try {
      vision = vision_answer(*vplan, query, lmm, prompts, trace);
      out.answers["vision"] = *vision;
    } catch (const Error& e) {
      if (trace) trace->add("vision_error", "", e.what());
    }
  }

  Answer final;
  if (config.enable_voting) {
    std::optional<Answer> voted_language, voted_vision;
    if (language) {
      voted_language = vanilla ? vote(*vanilla, *language, query, lmm, prompts,
                                      Stage::voted_language, config.strict_voting, trace)
                               : relabel(*language, Stage::voted_language);
      out.answers["voted_language"] = *voted_language;
    }
    if (vision) {
      voted_vision = vanilla ? vote(*vanilla, *vision, query, lmm, prompts, Stage::voted_vision,
                                    config.strict_voting, trace)
                             : relabel(*vision, Stage::voted_vision);
      out.answers["voted_vision"] = *voted_vision;
    }

    if (voted_language && voted_vision)
      final = vote(*voted_language, *voted_vision, query, lmm, prompts, Stage::final_answer,
                   config.strict_voting, trace);
    else if (voted_language)
      final = relabel(*voted_language, Stage::final_answer);
    else if (voted_vision)
      final = relabel(*voted_vision, Stage::final_answer);
    else if (vanilla)
      final = relabel(*vanilla, Stage::final_answer);
    else
      final = abstention(Stage::final_answer);
  } else {
    if (vision)
      final = relabel(*vision, Stage::final_answer);
    else if (language)
      final = relabel(*language, Stage::final_answer);
    else if (vanilla)
      final = relabel(*vanilla, Stage::final_answer);
    else
      final = abstention(Stage::final_answer);
  }

  out.answers["final"] = final;
  out.final = final;
  return out;
}

}  // namespace vlp
