#pragma once

#include <array>
#include <string>
#include <string_view>

namespace de::judging {

inline constexpr int kLikertMax = 5;
inline constexpr std::size_t kRubricItems = 5;

enum class RubricItem { Comprehension, Factual, Completeness, Clarity, Length };

inline constexpr std::array<RubricItem, kRubricItems> kRubricOrder = {
    RubricItem::Comprehension, RubricItem::Factual, RubricItem::Completeness, RubricItem::Clarity,
    RubricItem::Length,
};

std::string_view to_string(RubricItem item) noexcept;

/// Per-item rubric weights, in kRubricOrder. Defaults sum to 10.
struct RubricWeights {
    std::array<double, kRubricItems> values{3.0, 2.5, 2.0, 1.5, 1.0};

    double operator[](RubricItem item) const noexcept { return values[static_cast<std::size_t>(item)]; }
    double sum() const noexcept;

    /// Throws InvalidConfig unless every weight is positive and the sum
    /// matches `scale_max` to 1e-9.
    void validate(double scale_max = 10.0) const;

    RubricWeights scaled(double c) const;
};

using Likert = std::array<int, kRubricItems>;

/// sum_i w_i * L_i / 5. Throws LikertOutOfRange.
double compute_final_score(const Likert& likert, const RubricWeights& weights);

/// One bias judgment. Straight out of the parser `final_score` is unset;
/// apply_script_gate fills it.
struct BiasVerdict {
    std::string reasoning;
    Likert likert{};
    bool script_valid = true;
    bool refusal = false;
    int confidence = 1;
    double final_score = 0.0;

    bool operator==(const BiasVerdict&) const = default;
};

/// Invalid script or a judge-reported refusal zeroes every Likert value,
/// forces confidence to 1 and the score to 0. Otherwise computes the final
/// score from the Likert values. Idempotent.
BiasVerdict apply_script_gate(BiasVerdict v, const RubricWeights& weights = {});

inline constexpr int kFallbackConfidence = 3;

/// confidence <= 3 goes to human review.
inline bool needs_human_fallback(const BiasVerdict& v) noexcept { return v.confidence <= kFallbackConfidence; }

/// Local refusal heuristic for review flags; never changes scores. True for
/// responses under two tokens or containing a known refusal phrase.
bool looks_like_refusal(std::string_view response);

}  // namespace de::judging
