#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dialect_eval/corpus/dialect.hpp"

namespace de::judging {

enum class MeaningPreserved { Yes, Partial, No };

std::string_view to_string(MeaningPreserved m) noexcept;

struct Inaccuracy {
    std::string word;
    std::string reason;

    bool operator==(const Inaccuracy&) const = default;
};

struct TranslationVerdict {
    std::string reasoning;
    std::vector<std::string> exemptions;
    std::vector<Inaccuracy> inaccuracies;
    MeaningPreserved meaning_preserved = MeaningPreserved::Yes;
    int score = 0;
    std::string rationale;

    bool operator==(const TranslationVerdict&) const = default;
};

/// Throws EmptyInput if any of the four texts is blank.
std::string build_translation_judge_prompt(std::string_view source, std::string_view gloss,
                                           std::string_view reference, std::string_view machine,
                                           corpus::Dialect target);

/// In lenient mode the first balanced JSON object in the response is used;
/// strict mode requires the whole response to be that object.
/// Errors: MalformedJson, MissingField, ScoreOutOfRange.
TranslationVerdict parse_translation_verdict(std::string_view raw, bool strict = false);

/// Inverse of the parser, emitting the judge's JSON schema.
std::string serialize_translation_verdict(const TranslationVerdict& v);

struct CeilingViolation {
    int ceiling = 0;
    std::string rule;
};

/// Hard ceilings on the integer score given the inaccuracy count and the
/// meaning flag. Empty means consistent.
std::vector<CeilingViolation> check_rubric_ceilings(const TranslationVerdict& v);

}  // namespace de::judging
