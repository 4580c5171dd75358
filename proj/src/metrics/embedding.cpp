#include <algorithm>
#include <limits>

#include "dialect_eval/common/error.hpp"
#include "dialect_eval/metrics/textmetrics.hpp"

namespace de::metrics {

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw Error(Errc::DimensionMismatch,
                    "vectors have dimensions " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
    }
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (!(na > 0.0) || !(nb > 0.0)) throw Error(Errc::ZeroVector, "cosine of a zero vector");
    return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

double bertscore_f1(const Matrix& hyp_tokens, const Matrix& ref_tokens) {
    if (hyp_tokens.empty() || ref_tokens.empty()) throw Error(Errc::EmptyInput, "token matrices must be non-empty");
    if (hyp_tokens.cols() != ref_tokens.cols()) {
        throw Error(Errc::DimensionMismatch, "hypothesis and reference token vectors differ in dimension");
    }
    Matrix hyp;
    Matrix ref;
    for (std::size_t i = 0; i < hyp_tokens.rows(); ++i) hyp.append_row(unit_normalized(hyp_tokens.row(i)));
    for (std::size_t j = 0; j < ref_tokens.rows(); ++j) ref.append_row(unit_normalized(ref_tokens.row(j)));

    std::vector<double> best_for_hyp(hyp.rows(), -std::numeric_limits<double>::infinity());
    std::vector<double> best_for_ref(ref.rows(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < hyp.rows(); ++i) {
        for (std::size_t j = 0; j < ref.rows(); ++j) {
            const double s = dot(hyp.row(i), ref.row(j));
            best_for_hyp[i] = std::max(best_for_hyp[i], s);
            best_for_ref[j] = std::max(best_for_ref[j], s);
        }
    }
    double precision = 0.0;
    for (double s : best_for_hyp) precision += s;
    precision /= static_cast<double>(hyp.rows());
    double recall = 0.0;
    for (double s : best_for_ref) recall += s;
    recall /= static_cast<double>(ref.rows());
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

}  // namespace de::metrics
