#include "dialect_eval/agreement/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dialect_eval/common/error.hpp"

namespace de::agreement {

namespace {

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

struct Moments {
    double mean_a;
    double mean_b;
    double var_a;
    double var_b;
    double cov;
};

Moments moments(const std::vector<double>& a, const std::vector<double>& b, double denom) {
    Moments m{mean(a), mean(b), 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - m.mean_a;
        const double db = b[i] - m.mean_b;
        m.var_a += da * da;
        m.var_b += db * db;
        m.cov += da * db;
    }
    m.var_a /= denom;
    m.var_b /= denom;
    m.cov /= denom;
    return m;
}

bool constant(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

double pearson_of(const std::vector<double>& a, const std::vector<double>& b) {
    if (constant(a) || constant(b)) throw Error(Errc::ZeroVariance, "correlation of a constant series");
    const Moments m = moments(a, b, static_cast<double>(a.size()));
    return std::clamp(m.cov / std::sqrt(m.var_a * m.var_b), -1.0, 1.0);
}

}  // namespace

ScoreSeries::ScoreSeries(std::vector<std::string> ids, std::vector<double> a, std::vector<double> b, double scale_max)
    : ids_(std::move(ids)), a_(std::move(a)), b_(std::move(b)), scale_max_(scale_max) {
    if (!(scale_max_ > 0.0)) throw Error(Errc::InvalidSeries, "scale_max must be positive");
    if (a_.size() != b_.size() || ids_.size() != a_.size()) {
        throw Error(Errc::InvalidSeries, "ids, a and b must have equal length");
    }
    if (a_.size() < 2) throw Error(Errc::InvalidSeries, "series needs at least two items");
    auto in_range = [&](double x) { return std::isfinite(x) && x >= 0.0 && x <= scale_max_; };
    if (!std::all_of(a_.begin(), a_.end(), in_range) || !std::all_of(b_.begin(), b_.end(), in_range)) {
        throw Error(Errc::InvalidSeries, "scores must lie in [0, scale_max]");
    }
}

ScoreSeries ScoreSeries::of(std::vector<double> a, std::vector<double> b, double scale_max) {
    std::vector<std::string> ids(a.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = std::to_string(i);
    return ScoreSeries(std::move(ids), std::move(a), std::move(b), scale_max);
}

void CbsParams::validate() const {
    if (!(scale_max > 0.0) || !(threshold > 0.0) || !(threshold < scale_max)) {
        throw Error(Errc::InvalidConfig, "CBS threshold must satisfy 0 < threshold < scale_max");
    }
}

double pearson(const ScoreSeries& s) { return pearson_of(s.a(), s.b()); }

std::vector<double> average_ranks(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
        i = j + 1;
    }
    return ranks;
}

double spearman(const ScoreSeries& s) { return pearson_of(average_ranks(s.a()), average_ranks(s.b())); }

double ccc(const ScoreSeries& s, VarianceKind variance) {
    if (constant(s.a()) && constant(s.b())) throw Error(Errc::DegenerateSeries, "both series are constant");
    const double n = static_cast<double>(s.size());
    const Moments m = moments(s.a(), s.b(), variance == VarianceKind::Population ? n : n - 1.0);
    const double shift = m.mean_a - m.mean_b;
    return 2.0 * m.cov / (m.var_a + m.var_b + shift * shift);
}

double mae(const ScoreSeries& s) {
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) total += std::abs(s.a()[i] - s.b()[i]);
    return total / static_cast<double>(s.size());
}

std::optional<double> cbs(const ScoreSeries& s, const CbsParams& p) {
    p.validate();
    std::size_t critical = 0;
    std::size_t agreed = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.a()[i] < p.threshold) {
            ++critical;
            if (s.b()[i] < p.threshold) ++agreed;
        }
    }
    if (critical == 0) return std::nullopt;
    const double recall = static_cast<double>(agreed) / static_cast<double>(critical);
    return recall * (1.0 - mae(s) / p.scale_max);
}

AgreementReport agreement_report(const ScoreSeries& s, const CbsParams& p, VarianceKind variance) {
    AgreementReport r;
    r.n_items = s.size();
    r.n_critical = static_cast<std::size_t>(
        std::count_if(s.a().begin(), s.a().end(), [&](double x) { return x < p.threshold; }));
    r.ccc = ccc(s, variance);
    r.cbs = cbs(s, p);
    r.pearson = pearson(s);
    r.spearman = spearman(s);
    r.mae = mae(s);
    r.passes_ccc = r.ccc >= kCccThreshold;
    r.passes_cbs = r.cbs.has_value() && *r.cbs >= kCbsThreshold;
    return r;
}

std::vector<CorrelationRow> correlation_study(const std::vector<NamedColumn>& metric_columns,
                                              const std::vector<double>& human) {
    std::vector<CorrelationRow> rows;
    rows.reserve(metric_columns.size());
    for (const auto& col : metric_columns) {
        if (col.values.size() != human.size()) {
            throw Error(Errc::InvalidSeries, "column '" + col.name + "' length differs from the human column");
        }
        const auto s = ScoreSeries::of(col.values, human, 1.0);
        rows.push_back({col.name, pearson(s), spearman(s), ccc(s)});
    }
    return rows;
}

}  // namespace de::agreement
