#include "dialect_eval/common/matrix.hpp"

#include <cmath>
#include <string>

namespace de {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m;
    for (const auto& r : rows) m.append_row(r);
    return m;
}

void Matrix::append_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) {
        cols_ = values.size();
    } else if (values.size() != cols_) {
        throw Error(Errc::DimensionMismatch,
                    "row has " + std::to_string(values.size()) + " columns, expected " + std::to_string(cols_));
    }
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) s += a[i] * b[i];
    return s;
}

double l2_norm(std::span<const double> v) noexcept {
    return std::sqrt(dot(v, v));
}

std::vector<double> unit_normalized(std::span<const double> v) {
    const double n = l2_norm(v);
    if (!(n > 0.0) || !std::isfinite(n)) throw Error(Errc::ZeroVector, "vector has zero or non-finite norm");
    std::vector<double> out(v.begin(), v.end());
    for (double& x : out) x /= n;
    return out;
}

}  // namespace de
