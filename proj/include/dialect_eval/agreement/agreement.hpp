#pragma once

#include <optional>
#include <string>
#include <vector>

namespace de::agreement {

/// Paired per-item scores from rater A (the primary) and rater B.
class ScoreSeries {
public:
    /// Throws InvalidSeries unless the three vectors have equal length >= 2
    /// and every score lies in [0, scale_max].
    ScoreSeries(std::vector<std::string> ids, std::vector<double> a, std::vector<double> b, double scale_max = 10.0);

    /// Ids default to "0".."n-1".
    static ScoreSeries of(std::vector<double> a, std::vector<double> b, double scale_max = 10.0);

    const std::vector<std::string>& ids() const noexcept { return ids_; }
    const std::vector<double>& a() const noexcept { return a_; }
    const std::vector<double>& b() const noexcept { return b_; }
    double scale_max() const noexcept { return scale_max_; }
    std::size_t size() const noexcept { return a_.size(); }

    ScoreSeries swapped() const { return ScoreSeries(ids_, b_, a_, scale_max_); }

private:
    std::vector<std::string> ids_;
    std::vector<double> a_;
    std::vector<double> b_;
    double scale_max_;
};

struct CbsParams {
    double threshold = 4.0;
    double scale_max = 10.0;

    void validate() const;
};

inline constexpr double kCccThreshold = 0.80;
inline constexpr double kCbsThreshold = 0.75;

enum class VarianceKind { Population, Sample };

/// Throws ZeroVariance when either side is constant.
double pearson(const ScoreSeries& s);

/// Pearson over average ranks. Throws ZeroVariance when either side is
/// constant.
double spearman(const ScoreSeries& s);

/// Lin's concordance correlation. Throws DegenerateSeries when both sides
/// are constant.
double ccc(const ScoreSeries& s, VarianceKind variance = VarianceKind::Population);

double mae(const ScoreSeries& s);

/// Critical Bias Sensitivity: recall of B on the rows where A scores below
/// the threshold, times (1 - mae / scale_max). nullopt when A has no critical
/// rows.
std::optional<double> cbs(const ScoreSeries& s, const CbsParams& p = {});

struct AgreementReport {
    double ccc = 0.0;
    std::optional<double> cbs;
    double pearson = 0.0;
    double spearman = 0.0;
    double mae = 0.0;
    std::size_t n_items = 0;
    std::size_t n_critical = 0;
    bool passes_ccc = false;
    bool passes_cbs = false;
};

AgreementReport agreement_report(const ScoreSeries& s, const CbsParams& p = {},
                                 VarianceKind variance = VarianceKind::Population);

struct NamedColumn {
    std::string name;
    std::vector<double> values;
};

struct CorrelationRow {
    std::string metric;
    double pearson = 0.0;
    double spearman = 0.0;
    double ccc = 0.0;
};

/// One row per metric column against the human column; all inputs already
/// on [0,1].
std::vector<CorrelationRow> correlation_study(const std::vector<NamedColumn>& metric_columns,
                                              const std::vector<double>& human);

/// Average ranks (1-based), ties share the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& values);

}  // namespace de::agreement
