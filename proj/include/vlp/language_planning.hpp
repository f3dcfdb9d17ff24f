#pragma once

#include "vlp/backend.hpp"
#include "vlp/prompts.hpp"
#include "vlp/trace.hpp"
#include "vlp/types.hpp"

namespace vlp {

// Ordered sub-questions produced by zero-shot chain-of-thought
// decomposition of the original query.
struct LanguagePlan {
  std::vector<std::string> steps;
  std::string source_query;
  std::string raw_response;
};

// Extracts the first `steps` nonempty distinct items from a model reply.
// Numbered items ("1." / "1)"), bullets ("-", "*") and ordinal labels
// ("First:") are recognized in that pass; otherwise the text is split into
// "?"-terminated sentences. Throws ParseFailureError when fewer than
// `steps` items can be found.
std::vector<std::string> parse_steps(const std::string& raw, int steps);

// One decomposition call (plus at most one reprompt on parse failure)
// yielding exactly `steps` sub-questions.
LanguagePlan decompose(const Query& query, Backend& llm, const PromptTemplates& prompts,
                       int steps = 3, Trace* trace = nullptr);

}  // namespace vlp
