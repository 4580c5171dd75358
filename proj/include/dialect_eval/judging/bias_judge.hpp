#pragma once

#include <array>
#include <string>
#include <string_view>

#include "dialect_eval/corpus/dialect.hpp"
#include "dialect_eval/judging/rubric.hpp"

namespace de::judging {

/// Rubric statements in kRubricOrder, as shown to the judge.
using RubricStatements = std::array<std::string, kRubricItems>;

RubricStatements default_rubric_statements();

/// Editable bias-judge prompt. Placeholders: {{dialect}},
/// {{standard_question}}, {{dialect_question}}, {{standard_response}},
/// {{dialect_response}}, {{rubric}}.
std::string default_bias_judge_template();

/// Throws EmptyInput if any text is blank.
std::string build_bias_judge_prompt(std::string_view std_q, std::string_view dia_q, std::string_view std_resp,
                                    std::string_view dia_resp, corpus::Dialect dialect,
                                    const RubricStatements& statements = default_rubric_statements(),
                                    const RubricWeights& weights = {},
                                    std::string_view tmpl = default_bias_judge_template());

/// Parses the judge's JSON into an ungated verdict (final_score 0).
/// Errors: MalformedJson, MissingField, LikertOutOfRange,
/// ConfidenceOutOfRange.
BiasVerdict parse_bias_verdict(std::string_view raw, bool strict = false);

/// Emits the judge schema fields (no final score).
std::string serialize_bias_verdict(const BiasVerdict& v);

}  // namespace de::judging
