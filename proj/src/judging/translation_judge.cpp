#include "dialect_eval/judging/translation_judge.hpp"

#include <nlohmann/json.hpp>

#include "dialect_eval/common/error.hpp"
#include "dialect_eval/common/template.hpp"
#include "dialect_eval/corpus/text.hpp"
#include "verdict_fields.hpp"

namespace de::judging {

using json = nlohmann::json;

namespace {

constexpr std::string_view kPrompt = R"(You are a native speaker of the {{dialect}} dialect of Bengali and an expert judge of translation fidelity. Bengali dialects have no standardized spelling, so judge by how words SOUND when spoken in {{dialect}}, not by how they are written.

## Inputs
[SOURCE - Standard Bengali]
{{source}}

[ENGLISH GLOSS]
{{gloss}}

[HUMAN REFERENCE - {{dialect}}]
{{reference}}

[MACHINE TRANSLATION - {{dialect}}]
{{machine}}

## Step 1 - Exempt differences (never penalize)
1. Phonetic equivalence: spellings that yield the same or a near-identical {{dialect}} pronunciation count as the same word.
2. Numbers written as digits versus words (for example ৬৪ versus the spelled-out number).
3. Whitespace differences, including words written joined versus separated, and differences in terminal punctuation.
4. Minor morphological suffix variants that are valid in the dialect.

## Step 2 - Count inaccuracies
For every difference not exempted in Step 1, count the words that are:
- INACCURATE_WORD: a wrong dialect word or a word with an incorrect meaning;
- MEANING_SHIFT: a change of register (for example informal versus formal "you") or of sense (for example "what" versus "where").
A valid dialect synonym is NOT an inaccuracy.

## Step 3 - Score with this strict rubric (integer 0-10)
| Score | Condition |
|-------|-----------|
| 10 | Only exempt differences |
| 9 | Exactly one valid dialect synonym |
| 8 | One slightly-off word, meaning fully intact |
| 7 | Maximum for exactly one inaccurate word or meaning shift |
| 6 | Exactly two inaccuracies, meaning mostly intact |
| 5 | Exactly two inaccuracies, meaning noticeably weakened |
| 4 | Three inaccuracies, gist intact |
| 3 | Three inaccuracies, only partly right |
| 1-2 | Four or more inaccuracies, or meaning drastically changed |
| 0 | Total failure, wrong dialect or language, or hallucinated content |

Hard ceilings: one inaccuracy means the score is at most 7; two inaccuracies mean at most 6.

## Output
Return ONLY a JSON object. Write chain_of_thought_reasoning FIRST, working through: (1) the human reference, (2) the machine translation, (3) the exempt phonetic and spacing matches, (4) the count of remaining inaccurate or shifted words, (5) the resulting score.
{
  "chain_of_thought_reasoning": "<steps 1-5>",
  "exempt_differences_found": "<comma-separated list, or none>",
  "inaccurate_words": "<comma-separated, each as: word (brief reason), or none>",
  "meaning_preserved": "yes | partial | no",
  "score_integer": <integer 0-10>,
  "score_rationale": "<one sentence citing the rubric row and the inaccuracy count>"
}
)";

void require_text_input(std::string_view text, const char* name) {
    if (corpus::normalize_text(text).display.empty()) {
        throw Error(Errc::EmptyInput, std::string(name) + " is empty");
    }
}

Inaccuracy split_inaccuracy(const std::string& item) {
    if (auto open = item.find(" ("); open != std::string::npos && item.back() == ')') {
        return {item.substr(0, open), item.substr(open + 2, item.size() - open - 3)};
    }
    if (auto colon = item.find(':'); colon != std::string::npos) {
        auto reason = item.substr(colon + 1);
        if (!reason.empty() && reason.front() == ' ') reason.erase(0, 1);
        return {item.substr(0, colon), reason};
    }
    if (auto dash = item.find(" - "); dash != std::string::npos) {
        return {item.substr(0, dash), item.substr(dash + 3)};
    }
    return {item, ""};
}

MeaningPreserved parse_meaning(const json& obj) {
    const std::string value = detail::require_text(obj, "meaning_preserved", true);
    std::string lower;
    for (char c : value) {
        if (!std::isspace(static_cast<unsigned char>(c))) lower.push_back(static_cast<char>(std::tolower(c)));
    }
    if (lower == "yes") return MeaningPreserved::Yes;
    if (lower == "partial") return MeaningPreserved::Partial;
    if (lower == "no") return MeaningPreserved::No;
    throw Error(Errc::MalformedJson, "meaning_preserved must be yes, partial or no");
}

std::string join(const std::vector<std::string>& items) {
    if (items.empty()) return "none";
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += ", ";
        out += s;
    }
    return out;
}

}  // namespace

std::string_view to_string(MeaningPreserved m) noexcept {
    switch (m) {
        case MeaningPreserved::Yes: return "yes";
        case MeaningPreserved::Partial: return "partial";
        case MeaningPreserved::No: return "no";
    }
    return "no";
}

std::string build_translation_judge_prompt(std::string_view source, std::string_view gloss,
                                           std::string_view reference, std::string_view machine,
                                           corpus::Dialect target) {
    require_text_input(source, "source");
    require_text_input(gloss, "gloss");
    require_text_input(reference, "reference");
    require_text_input(machine, "machine translation");
    return render_template(kPrompt, {{"dialect", std::string(corpus::to_string(target))},
                                     {"source", corpus::normalize_text(source).display},
                                     {"gloss", corpus::normalize_text(gloss).display},
                                     {"reference", corpus::normalize_text(reference).display},
                                     {"machine", corpus::normalize_text(machine).display}});
}

TranslationVerdict parse_translation_verdict(std::string_view raw, bool strict) {
    const json obj = detail::parse_verdict_object(raw, strict);
    TranslationVerdict v;
    v.reasoning = detail::require_text(obj, "chain_of_thought_reasoning", true);
    v.exemptions = detail::split_list(detail::require(obj, "exempt_differences_found"));
    for (const auto& item : detail::split_list(detail::require(obj, "inaccurate_words"))) {
        v.inaccuracies.push_back(split_inaccuracy(item));
    }
    v.meaning_preserved = parse_meaning(obj);
    v.score = detail::require_int(obj, "score_integer", 0, 10, static_cast<int>(Errc::ScoreOutOfRange));
    v.rationale = detail::require_text(obj, "score_rationale", false);
    return v;
}

std::string serialize_translation_verdict(const TranslationVerdict& v) {
    std::vector<std::string> words;
    words.reserve(v.inaccuracies.size());
    for (const auto& i : v.inaccuracies) words.push_back(i.reason.empty() ? i.word : i.word + " (" + i.reason + ")");
    json obj = json::object();
    obj["chain_of_thought_reasoning"] = v.reasoning;
    obj["exempt_differences_found"] = join(v.exemptions);
    obj["inaccurate_words"] = join(words);
    obj["meaning_preserved"] = std::string(to_string(v.meaning_preserved));
    obj["score_integer"] = v.score;
    obj["score_rationale"] = v.rationale;
    return obj.dump();
}

std::vector<CeilingViolation> check_rubric_ceilings(const TranslationVerdict& v) {
    std::vector<CeilingViolation> out;
    const std::size_t n = v.inaccuracies.size();
    if (n == 1 && v.score > 7) out.push_back({7, "one inaccuracy caps the score at 7"});
    if (n == 2 && v.score > 6) out.push_back({6, "two inaccuracies cap the score at 6"});
    if (n >= 4 && v.score > 2) out.push_back({2, "four or more inaccuracies cap the score at 2"});
    if (v.meaning_preserved == MeaningPreserved::No && v.score > 2) {
        out.push_back({2, "meaning not preserved caps the score at 2"});
    }
    return out;
}

}  // namespace de::judging
