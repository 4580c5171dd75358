#pragma once

#include <span>
#include <string>
#include <string_view>

#include "dialect_eval/common/matrix.hpp"

namespace de::metrics {

/// Sentence BLEU on normalized whitespace tokens, 0-100.
///
/// Modified n-gram precisions up to `max_n`, exponential smoothing for
/// orders with no matches (each successive zero halves the floor), brevity
/// penalty, geometric mean over the orders the hypothesis is long enough to
/// have. Throws EmptyReference.
double bleu(std::string_view hypothesis, std::string_view reference, int max_n = 4);

/// chrF: character n-gram F_beta over code points with whitespace removed,
/// averaged over orders 1..n that occur in both strings, 0-100.
double chrf(std::string_view hypothesis, std::string_view reference, int n = 6, double beta = 2.0);

/// Word error rate in percent; can exceed 100. Throws EmptyReference.
double wer(std::string_view hypothesis, std::string_view reference);

/// Throws DimensionMismatch, ZeroVector.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Greedy-matching BERTScore F1 (no idf, no baseline rescaling). Rows are
/// token vectors, normalized internally. Throws EmptyInput.
double bertscore_f1(const Matrix& hyp_tokens, const Matrix& ref_tokens);

enum class MetricKind { BLEU, ChrF, WER, CosineSim, BertF1 };

std::string_view to_string(MetricKind kind) noexcept;

struct MetricValue {
    MetricKind kind;
    double raw;
    double normalized;
};

/// Maps a raw value onto [0,1]: /100 for BLEU and ChrF, clamp(0,100)/100 for
/// WER, clamp(0,1) for the embedding similarities.
double normalize_metric(double value, MetricKind kind) noexcept;

inline MetricValue make_metric(MetricKind kind, double raw) noexcept {
    return {kind, raw, normalize_metric(raw, kind)};
}

}  // namespace de::metrics
