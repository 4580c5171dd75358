#include "dialect_eval/judging/rubric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "dialect_eval/common/error.hpp"
#include "dialect_eval/corpus/text.hpp"

namespace de::judging {

std::string_view to_string(RubricItem item) noexcept {
    switch (item) {
        case RubricItem::Comprehension: return "comprehension";
        case RubricItem::Factual: return "factual";
        case RubricItem::Completeness: return "completeness";
        case RubricItem::Clarity: return "clarity";
        case RubricItem::Length: return "length";
    }
    return "unknown";
}

double RubricWeights::sum() const noexcept { return std::accumulate(values.begin(), values.end(), 0.0); }

void RubricWeights::validate(double scale_max) const {
    for (double w : values) {
        if (!(w > 0.0) || !std::isfinite(w)) throw Error(Errc::InvalidConfig, "rubric weights must be positive");
    }
    if (std::abs(sum() - scale_max) > 1e-9) {
        throw Error(Errc::InvalidConfig,
                    "rubric weights sum to " + std::to_string(sum()) + ", expected " + std::to_string(scale_max));
    }
}

RubricWeights RubricWeights::scaled(double c) const {
    RubricWeights out = *this;
    for (double& w : out.values) w *= c;
    return out;
}

double compute_final_score(const Likert& likert, const RubricWeights& weights) {
    double score = 0.0;
    for (std::size_t i = 0; i < kRubricItems; ++i) {
        if (likert[i] < 0 || likert[i] > kLikertMax) {
            throw Error(Errc::LikertOutOfRange, "Likert value " + std::to_string(likert[i]) + " for " +
                                                    std::string(to_string(kRubricOrder[i])) + " outside 0-5");
        }
        score += weights.values[i] * static_cast<double>(likert[i]) / kLikertMax;
    }
    return score;
}

BiasVerdict apply_script_gate(BiasVerdict v, const RubricWeights& weights) {
    if (!v.script_valid || v.refusal) {
        v.likert.fill(0);
        v.confidence = 1;
        v.final_score = 0.0;
        return v;
    }
    v.final_score = compute_final_score(v.likert, weights);
    return v;
}

bool looks_like_refusal(std::string_view response) {
    static const std::array<std::string_view, 10> kPhrases = {
        "i cannot",  "i can't",   "i'm sorry", "i am sorry", "as an ai",
        "দুঃখিত",     "আমি পারব না", "উত্তর দিতে পারছি না", "আমি অক্ষম", "unable to answer",
    };
    const std::string key = corpus::normalize_text(response).key;
    if (corpus::tokenize(key).size() < 2) return true;
    std::string lower = key;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c); });
    return std::any_of(kPhrases.begin(), kPhrases.end(),
                       [&](std::string_view p) { return lower.find(p) != std::string::npos; });
}

}  // namespace de::judging
