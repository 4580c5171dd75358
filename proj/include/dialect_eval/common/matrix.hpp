#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dialect_eval/common/error.hpp"

namespace de {

/// Dense row-major matrix of doubles. Rows are the natural unit (one
/// embedding per row).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    void append_row(std::span<const double> values);

    const std::vector<double>& data() const noexcept { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double l2_norm(std::span<const double> v) noexcept;

/// Returns v / ||v||. Throws ZeroVector when the norm is zero or not finite.
std::vector<double> unit_normalized(std::span<const double> v);

}  // namespace de
