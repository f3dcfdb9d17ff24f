#include "vlp/prompts.hpp"

#include <fstream>
#include <sstream>

namespace vlp {

PromptTemplates PromptTemplates::defaults() {
  PromptTemplates t;
  t.cs =
      "Is this question a query about potential future actions or alternative or states?\n"
      "{question}";
  t.fs =
      "Does the information within the frame provide the necessary details to accurately "
      "answer the given question\n{question}{options_block}";
  t.lp_vision_language =
      "Imagine that you are trying to answer a Video Q&A Multi-choice Question. You will "
      "firstly watch a video and then answer this question. {question} You will answer this "
      "question following {count} questions, what are these {count} questions?";
  t.lp_vision_only =
      "Imagine that you are trying to describe what is happening in a video. You will firstly "
      "watch the video and then give the description. {question} You will answer this question "
      "following {count} questions, what are these {count} questions?";
  t.lp_language_only =
      "Imagine that you are trying to respond to a request. {question} You will answer this "
      "question following {count} questions, what are these {count} questions?";
  t.lp_reprompt = "List exactly {count} questions, numbered 1-{n}.";
  t.vote =
      "Question: {question}\nCandidate 1: {candidate_1}\nCandidate 2: {candidate_2}\n"
      "Which answer is more valid? Reply 1 or 2.";
  t.answer = "{question}{options_block}";
  t.language_final =
      "Based on the answers of all steps, answer the original question.\n"
      "{question}{options_block}";
  t.mcq_suffix = "\nOptions:\n{options}\nAnswer with the letter of the best option.";
  t.caption_instruction = "Describe what is happening in the video.";
  t.v2l = "Describe the visual content of these frames in one sentence.";
  t.l2v = "{question}";
  t.current_frames_label = "Current frames:";
  t.future_frames_label = "Possible future frames:";
  return t;
}

void PromptTemplates::load_overrides(const std::filesystem::path& dir) {
  auto load = [&dir](const char* name, std::string& slot) {
    const std::filesystem::path p = dir / (std::string(name) + ".txt");
    std::ifstream in(p);
    if (!in) return;
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    slot = std::move(text);
  };
  load("cs", cs);
  load("fs", fs);
  load("lp_vision_language", lp_vision_language);
  load("lp_vision_only", lp_vision_only);
  load("lp_language_only", lp_language_only);
  load("lp_reprompt", lp_reprompt);
  load("vote", vote);
  load("answer", answer);
  load("language_final", language_final);
  load("mcq_suffix", mcq_suffix);
  load("caption_instruction", caption_instruction);
  load("v2l", v2l);
  load("l2v", l2v);
  load("current_frames_label", current_frames_label);
  load("future_frames_label", future_frames_label);
}

const std::string& PromptTemplates::lp_for(TaskKind kind) const {
  switch (kind) {
    case TaskKind::vision_language: return lp_vision_language;
    case TaskKind::vision_only: return lp_vision_only;
    case TaskKind::language_only: return lp_language_only;
  }
  return lp_vision_language;
}

std::string render(const std::string& tpl, const std::map<std::string, std::string>& vars) {
  std::string out = tpl;
  for (const auto& [key, value] : vars) {
    const std::string token = "{" + key + "}";
    size_t pos = 0;
    while ((pos = out.find(token, pos)) != std::string::npos) {
      out.replace(pos, token.size(), value);
      pos += value.size();
    }
  }
  return out;
}

std::string format_options(const std::vector<std::string>& options) {
  std::string out;
  for (size_t i = 0; i < options.size(); ++i) {
    if (i) out += "\n";
    out += "(";
    out += static_cast<char>('A' + i);
    out += ") " + options[i];
  }
  return out;
}

std::string options_block(const PromptTemplates& prompts, const Query& query) {
  if (!query.is_mcq()) return "";
  return render(prompts.mcq_suffix, {{"options", format_options(*query.options)}});
}

std::string context_block(const Query& query) {
  if (query.context.empty()) return "";
  return "Context: " + query.context + "\n";
}

std::string effective_question(const PromptTemplates& prompts, const Query& query) {
  return query.text.empty() ? prompts.caption_instruction : query.text;
}

std::string question_block(const PromptTemplates& prompts, const Query& query) {
  return context_block(query) + effective_question(prompts, query);
}

std::string count_word(int n) {
  static const char* words[] = {"zero", "one", "two",   "three", "four", "five",
                                "six",  "seven", "eight", "nine",  "ten"};
  if (n >= 0 && n <= 10) return words[n];
  return std::to_string(n);
}

}  // namespace vlp
