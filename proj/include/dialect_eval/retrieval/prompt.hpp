#pragma once

#include <span>
#include <string>

#include "dialect_eval/corpus/dialect.hpp"
#include "dialect_eval/corpus/text.hpp"
#include "dialect_eval/retrieval/hybrid.hpp"

namespace de::retrieval {

/// Placeholders: {{dialect}} everywhere; {{standard}} and {{dialect_text}}
/// in `example`; {{query}} in `footer`.
struct FewShotTemplate {
    std::string header;
    std::string example;
    std::string footer;

    static FewShotTemplate defaults();
};

/// Examples are emitted in candidate order. Throws NoCandidates when empty.
std::string build_fewshot_prompt(std::span<const Candidate> cands, const corpus::TaggedQuery& q,
                                 corpus::Dialect district, const FewShotTemplate& tmpl = FewShotTemplate::defaults());

}  // namespace de::retrieval
