#include "vlp/language_planning.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

namespace vlp {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool strip_bullet(std::string& s) {
  if (s.size() >= 2 && (s[0] == '-' || s[0] == '*') && std::isspace(static_cast<unsigned char>(s[1]))) {
    s = s.substr(2);
    return true;
  }
  // U+2022 bullet
  if (s.rfind("\xE2\x80\xA2", 0) == 0) {
    s = s.substr(3);
    return true;
  }
  return false;
}

bool strip_ordinal(std::string& s) {
  static const std::regex ordinal(
      R"(^(first|second|third|fourth|fifth|sixth|seventh|eighth|ninth|tenth)\s*[.,:\-]\s*)",
      std::regex::icase);
  std::smatch m;
  if (std::regex_search(s, m, ordinal)) {
    s = m.suffix().str();
    return true;
  }
  return false;
}

bool strip_numeric_marker(std::string& s) {
  static const std::regex marker(R"(^\d{1,2}\s*[.):]\s*)");
  std::smatch m;
  if (std::regex_search(s, m, marker)) {
    s = m.suffix().str();
    return true;
  }
  return false;
}

// Splits a line at inline numeric markers ("1." "2)" "3:") that start the
// line or follow whitespace and are not part of a number like "2.5". The
// chunk before the first marker comes back as segment 0.
std::vector<std::string> split_numeric(const std::string& line, bool& found) {
  std::vector<size_t> starts;
  for (size_t i = 0; i < line.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(line[i]))) continue;
    if (i > 0 && !std::isspace(static_cast<unsigned char>(line[i - 1]))) continue;
    size_t j = i;
    while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j])) && j - i < 2) ++j;
    if (j >= line.size()) break;
    if (line[j] != '.' && line[j] != ')' && line[j] != ':') continue;
    if (j + 1 < line.size() && std::isdigit(static_cast<unsigned char>(line[j + 1]))) continue;
    starts.push_back(i);
    i = j;
  }
  found = !starts.empty();
  if (starts.empty()) return {line};

  std::vector<std::string> segments;
  segments.push_back(line.substr(0, starts[0]));
  for (size_t k = 0; k < starts.size(); ++k) {
    const size_t end = (k + 1 < starts.size()) ? starts[k + 1] : line.size();
    segments.push_back(line.substr(starts[k], end - starts[k]));
  }
  return segments;
}

// Trailing prose after the final question mark is commentary, not a step.
void cut_after_last_question(std::string& s) {
  const size_t pos = s.rfind('?');
  if (pos != std::string::npos) s = s.substr(0, pos + 1);
}

std::vector<std::string> take_distinct(const std::vector<std::string>& items, int steps) {
  std::vector<std::string> out;
  for (const std::string& item : items) {
    if (std::find(out.begin(), out.end(), item) != out.end()) continue;
    out.push_back(item);
    if (static_cast<int>(out.size()) == steps) break;
  }
  return out;
}

}  // namespace

std::vector<std::string> parse_steps(const std::string& raw, int steps) {
  if (steps < 1) throw Error("parse_steps requires steps >= 1");
  if (trim(raw).empty()) throw ParseFailureError("empty response");

  // Pass 1: enumeration-marker items (numbered, bulleted, or ordinal-labeled).
  std::vector<std::string> items;
  std::string line;
  size_t pos = 0;
  while (pos <= raw.size()) {
    const size_t nl = raw.find('\n', pos);
    line = raw.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? raw.size() + 1 : nl + 1;

    bool line_numeric = false;
    const std::vector<std::string> segments = split_numeric(line, line_numeric);
    for (size_t i = 0; i < segments.size(); ++i) {
      std::string s = trim(segments[i]);
      if (s.empty()) continue;
      bool introduced = line_numeric && i > 0;
      if (introduced) strip_numeric_marker(s);
      if (strip_bullet(s)) introduced = true;
      if (strip_ordinal(s)) introduced = true;
      // Preamble before the first inline marker counts only if it is
      // itself a question.
      if (!introduced && line_numeric && i == 0 && s.back() == '?') introduced = true;
      if (!introduced) continue;
      s = trim(s);
      cut_after_last_question(s);
      s = trim(s);
      if (!s.empty()) items.push_back(s);
    }
  }
  std::vector<std::string> distinct = take_distinct(items, steps);
  if (static_cast<int>(distinct.size()) == steps) return distinct;

  // Pass 2: "?"-terminated sentences.
  std::vector<std::string> sentences;
  std::string current;
  for (const char c : raw) {
    current.push_back(c);
    if (c == '.' || c == '!' || c == '?') {
      if (c == '?') {
        std::string s = trim(current);
        strip_numeric_marker(s);
        strip_bullet(s);
        strip_ordinal(s);
        s = trim(s);
        if (!s.empty()) sentences.push_back(s);
      }
      current.clear();
    }
  }
  distinct = take_distinct(sentences, steps);
  if (static_cast<int>(distinct.size()) == steps) return distinct;

  throw ParseFailureError("found " + std::to_string(distinct.size()) + " steps, need " +
                          std::to_string(steps));
}

LanguagePlan decompose(const Query& query, Backend& llm, const PromptTemplates& prompts,
                       int steps, Trace* trace) {
  if (steps < 1) throw Error("decompose requires steps >= 1");
  const std::string question = question_block(prompts, query);
  if (question.empty()) throw Error("decompose requires a nonempty query");

  const std::string prompt = render(prompts.lp_for(query.task_kind),
                                    {{"question", question}, {"count", count_word(steps)}});

  BackendRequest request;
  request.kind = RequestKind::text_gen;
  request.messages = {{Role::user, {text_part(prompt)}}};

  const BackendResponse response = dispatch(llm, request);
  if (trace) trace->add("lp_decompose", cache_key(request), response.payload_summary());
  const std::string raw = response.text.value_or("");

  try {
    return LanguagePlan{parse_steps(raw, steps), question, raw};
  } catch (const ParseFailureError&) {
    // One reprompt, appended to the same conversation.
  }

  BackendRequest retry = request;
  retry.messages.push_back({Role::assistant, {text_part(raw)}});
  retry.messages.push_back(
      {Role::user,
       {text_part(render(prompts.lp_reprompt,
                         {{"count", count_word(steps)}, {"n", std::to_string(steps)}}))}});

  const BackendResponse second = dispatch(llm, retry);
  if (trace) trace->add("lp_reprompt", cache_key(retry), second.payload_summary());
  const std::string raw2 = second.text.value_or("");
  return LanguagePlan{parse_steps(raw2, steps), question, raw2};
}

}  // namespace vlp
