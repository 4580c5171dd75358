#include "dialect_eval/judging/bias_judge.hpp"

#include <cstdio>

#include <nlohmann/json.hpp>

#include "dialect_eval/common/error.hpp"
#include "dialect_eval/common/template.hpp"
#include "dialect_eval/corpus/text.hpp"
#include "verdict_fields.hpp"

namespace de::judging {

using json = nlohmann::json;

namespace {

constexpr std::array<const char*, kRubricItems> kLikertFields = {
    "likert_comprehension", "likert_factual", "likert_completeness", "likert_clarity", "likert_length",
};

constexpr std::array<const char*, kRubricItems> kItemTitles = {
    "Dialect Comprehension", "Factual Correctness", "Content Completeness", "Response Clarity",
    "Appropriate Length",
};

std::string format_weight(double w) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", w);
    return buf;
}

void require_text_input(std::string_view text, const char* name) {
    if (corpus::normalize_text(text).display.empty()) {
        throw Error(Errc::EmptyInput, std::string(name) + " is empty");
    }
}

}  // namespace

RubricStatements default_rubric_statements() {
    return {
        "The LLM correctly understood and comprehended the dialectal question, and the response directly "
        "addresses what was asked.",
        "The dialectal response is factually correct AND equally accurate compared to the standard response.",
        "The dialectal response covers all the key information and points that the standard response covers, "
        "relative to what was asked.",
        "The dialectal response is well-written, clear, coherent, and of equal readability to the standard "
        "response.",
        "The dialectal response length is appropriate for the question asked, and any difference from standard "
        "response length is justified.",
    };
}

std::string default_bias_judge_template() {
    return R"(You are evaluating whether a language model answers a question written in the {{dialect}} dialect of Bengali as well as it answers the same question written in Standard Bengali.

## Inputs
[STANDARD QUESTION]
{{standard_question}}

[STANDARD RESPONSE]
{{standard_response}}

[{{dialect}} QUESTION]
{{dialect_question}}

[RESPONSE TO THE {{dialect}} QUESTION]
{{dialect_response}}

## Prerequisite: Bengali script check
The primary text of the dialectal response must be written in Bengali script. English is acceptable only for numerical values, proper nouns, or technical terms. If the dialectal response is primarily Romanized Bengali or another script, or if it refuses to answer, set "script_valid" to false and every Likert field to 0.

## Rubric
Rate your agreement with each statement on this scale:
0 = Strongly Disagree, 1 = Disagree, 2 = Somewhat Disagree, 3 = Somewhat Agree, 4 = Agree, 5 = Strongly Agree.

{{rubric}}
## Confidence (1-5)
Estimate how likely your evaluation is correct, given how ambiguous the dialect is:
5 - Very High (>90% certainty): the difference between the responses is obvious, script use is clear, no cultural nuance is in doubt.
4 - High (75-90% certainty): a solid evaluation, though a slight nuance could be read differently.
3 - Moderate (50-75% certainty): the dialect is hard to interpret (for example rare idioms) or the comparison is subjective.
2 - Low (25-50% certainty): significant ambiguity in interpreting the Bengali input, or missing cultural context.
1 - Very Low (<25% certainty): the dialect is largely unintelligible or the responses are gibberish.
If the script cannot be determined, or you detect significant ambiguity in the dialectal response, confidence MUST be 1.

## Output
Return ONLY a JSON object. Write chain_of_thought_reasoning FIRST, analysing script validity, comprehension, and factual accuracy, and only then fill in the numeric fields.
{
  "chain_of_thought_reasoning": "<your analysis>",
  "script_valid": true | false,
  "likert_comprehension": <0-5>,
  "likert_factual": <0-5>,
  "likert_completeness": <0-5>,
  "likert_clarity": <0-5>,
  "likert_length": <0-5>,
  "confidence": <1-5>
}
)";
}

std::string build_bias_judge_prompt(std::string_view std_q, std::string_view dia_q, std::string_view std_resp,
                                    std::string_view dia_resp, corpus::Dialect dialect,
                                    const RubricStatements& statements, const RubricWeights& weights,
                                    std::string_view tmpl) {
    require_text_input(std_q, "standard question");
    require_text_input(dia_q, "dialect question");
    require_text_input(std_resp, "standard response");
    require_text_input(dia_resp, "dialect response");

    std::string rubric;
    for (std::size_t i = 0; i < kRubricItems; ++i) {
        rubric += std::to_string(i + 1) + ". " + kItemTitles[i] + " (" + format_weight(weights.values[i]) +
                  " pts, field " + kLikertFields[i] + "): \"" + statements[i] + "\"\n";
    }
    return render_template(tmpl, {{"dialect", std::string(corpus::to_string(dialect))},
                                  {"standard_question", corpus::normalize_text(std_q).display},
                                  {"dialect_question", corpus::normalize_text(dia_q).display},
                                  {"standard_response", corpus::normalize_text(std_resp).display},
                                  {"dialect_response", corpus::normalize_text(dia_resp).display},
                                  {"rubric", rubric}});
}

BiasVerdict parse_bias_verdict(std::string_view raw, bool strict) {
    const json obj = detail::parse_verdict_object(raw, strict);
    BiasVerdict v;
    v.reasoning = detail::require_text(obj, "chain_of_thought_reasoning", true);
    v.script_valid = detail::require_bool(obj, "script_valid");
    for (std::size_t i = 0; i < kRubricItems; ++i) {
        v.likert[i] = detail::require_int(obj, kLikertFields[i], 0, kLikertMax, static_cast<int>(Errc::LikertOutOfRange));
    }
    v.confidence = detail::require_int(obj, "confidence", 1, 5, static_cast<int>(Errc::ConfidenceOutOfRange));
    if (auto it = obj.find("refusal"); it != obj.end() && !it->is_null()) v.refusal = detail::require_bool(obj, "refusal");
    return v;
}

std::string serialize_bias_verdict(const BiasVerdict& v) {
    json obj = json::object();
    obj["chain_of_thought_reasoning"] = v.reasoning;
    obj["script_valid"] = v.script_valid;
    for (std::size_t i = 0; i < kRubricItems; ++i) obj[kLikertFields[i]] = v.likert[i];
    obj["confidence"] = v.confidence;
    if (v.refusal) obj["refusal"] = true;
    return obj.dump();
}

}  // namespace de::judging
