#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "dialect_eval/common/error.hpp"
#include "dialect_eval/common/utf8.hpp"
#include "dialect_eval/corpus/text.hpp"
#include "dialect_eval/metrics/textmetrics.hpp"

namespace de::metrics {

namespace {

std::vector<std::string> words(std::string_view text) {
    return corpus::tokenize(corpus::normalize_text(text).key);
}

template <typename Seq>
std::map<Seq, std::size_t> ngram_counts(const Seq& seq, std::size_t n) {
    std::map<Seq, std::size_t> counts;
    if (seq.size() < n) return counts;
    for (std::size_t i = 0; i + n <= seq.size(); ++i) ++counts[Seq(seq.begin() + i, seq.begin() + i + n)];
    return counts;
}

template <typename Seq>
std::size_t clipped_matches(const std::map<Seq, std::size_t>& hyp, const std::map<Seq, std::size_t>& ref) {
    std::size_t m = 0;
    for (const auto& [gram, count] : hyp) {
        if (auto it = ref.find(gram); it != ref.end()) m += std::min(count, it->second);
    }
    return m;
}

std::u32string chars_without_space(std::string_view text) {
    std::u32string out;
    for (char32_t cp : utf8::decode(corpus::normalize_text(text).key)) {
        if (cp != U' ') out.push_back(cp);
    }
    return out;
}

}  // namespace

double bleu(std::string_view hypothesis, std::string_view reference, int max_n) {
    if (max_n < 1) throw Error(Errc::InvalidArgument, "max_n must be at least 1");
    const auto ref = words(reference);
    if (ref.empty()) throw Error(Errc::EmptyReference, "reference has no tokens");
    const auto hyp = words(hypothesis);
    if (hyp.empty()) return 0.0;

    double log_sum = 0.0;
    int orders = 0;
    double smooth = 1.0;
    for (int n = 1; n <= max_n; ++n) {
        const auto hyp_counts = ngram_counts(hyp, static_cast<std::size_t>(n));
        const std::size_t total = hyp.size() >= static_cast<std::size_t>(n) ? hyp.size() - n + 1 : 0;
        if (total == 0) break;
        const std::size_t correct = clipped_matches(hyp_counts, ngram_counts(ref, static_cast<std::size_t>(n)));
        double precision;
        if (correct == 0) {
            smooth *= 2.0;
            precision = 1.0 / (smooth * static_cast<double>(total));
        } else {
            precision = static_cast<double>(correct) / static_cast<double>(total);
        }
        log_sum += std::log(precision);
        ++orders;
    }
    const double hyp_len = static_cast<double>(hyp.size());
    const double ref_len = static_cast<double>(ref.size());
    const double bp = hyp_len < ref_len ? std::exp(1.0 - ref_len / hyp_len) : 1.0;
    return 100.0 * bp * std::exp(log_sum / orders);
}

double chrf(std::string_view hypothesis, std::string_view reference, int n, double beta) {
    if (n < 1) throw Error(Errc::InvalidArgument, "n must be at least 1");
    if (!(beta > 0.0)) throw Error(Errc::InvalidArgument, "beta must be positive");
    const auto ref = chars_without_space(reference);
    if (ref.empty()) throw Error(Errc::EmptyReference, "reference has no characters");
    const auto hyp = chars_without_space(hypothesis);

    const double beta2 = beta * beta;
    double f_sum = 0.0;
    int orders = 0;
    for (int order = 1; order <= n; ++order) {
        const auto hyp_counts = ngram_counts(hyp, static_cast<std::size_t>(order));
        const auto ref_counts = ngram_counts(ref, static_cast<std::size_t>(order));
        if (hyp_counts.empty() || ref_counts.empty()) continue;
        const std::size_t hyp_total = hyp.size() - order + 1;
        const std::size_t ref_total = ref.size() - order + 1;
        const double match = static_cast<double>(clipped_matches(hyp_counts, ref_counts));
        const double p = match / static_cast<double>(hyp_total);
        const double r = match / static_cast<double>(ref_total);
        const double denom = beta2 * p + r;
        f_sum += denom > 0.0 ? (1.0 + beta2) * p * r / denom : 0.0;
        ++orders;
    }
    return orders == 0 ? 0.0 : 100.0 * f_sum / orders;
}

double wer(std::string_view hypothesis, std::string_view reference) {
    const auto ref = words(reference);
    if (ref.empty()) throw Error(Errc::EmptyReference, "reference has no tokens");
    const auto hyp = words(hypothesis);

    std::vector<std::size_t> prev(hyp.size() + 1);
    std::vector<std::size_t> cur(hyp.size() + 1);
    for (std::size_t j = 0; j <= hyp.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= ref.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= hyp.size(); ++j) {
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1)});
        }
        std::swap(prev, cur);
    }
    return 100.0 * static_cast<double>(prev[hyp.size()]) / static_cast<double>(ref.size());
}

std::string_view to_string(MetricKind kind) noexcept {
    switch (kind) {
        case MetricKind::BLEU: return "BLEU";
        case MetricKind::ChrF: return "ChrF";
        case MetricKind::WER: return "WER";
        case MetricKind::CosineSim: return "CosineSim";
        case MetricKind::BertF1: return "BertF1";
    }
    return "Unknown";
}

double normalize_metric(double value, MetricKind kind) noexcept {
    switch (kind) {
        case MetricKind::BLEU:
        case MetricKind::ChrF: return value / 100.0;
        case MetricKind::WER: return std::clamp(value, 0.0, 100.0) / 100.0;
        case MetricKind::CosineSim:
        case MetricKind::BertF1: return std::clamp(value, 0.0, 1.0);
    }
    return value;
}

}  // namespace de::metrics
