#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace matchstat {

using Vector = std::vector<double>;

// Dense row-major matrix. Only what the statistics need: no expression
// templates, no views.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t p);
    static Matrix from_rows(const std::vector<Vector>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }

    std::span<const double> data() const noexcept { return data_; }

    double max_abs() const noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm_inf(std::span<const double> v) noexcept;
double norm2(std::span<const double> v) noexcept;

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Vector matvec(const Matrix& a, std::span<const double> v);

// Lower-triangular Cholesky factor L of a symmetric positive-definite M = L L^T.
class SpdFactor {
public:
    std::size_t dim() const noexcept { return lower_.rows(); }
    const Matrix& lower() const noexcept { return lower_; }

    // Solves M x = b.
    Vector solve(std::span<const double> b) const;
    // Returns L v.
    Vector apply_lower(std::span<const double> v) const;
    // Solves L y = b.
    Vector forward_solve(std::span<const double> b) const;
    // Diagonal of M^{-1}.
    Vector inverse_diagonal() const;

private:
    friend SpdFactor spd_factor(const Matrix& m, double scale);
    explicit SpdFactor(Matrix lower) : lower_(std::move(lower)) {}
    Matrix lower_;
};

// Cholesky factorization. A pivot <= p * 1e-12 * max(max diagonal, scale)
// raises SingularMatrixError("matrix not positive definite"). `scale` lets a
// caller anchor the tolerance to the magnitude of related data, so a matrix
// that is zero up to rounding is still reported as singular.
SpdFactor spd_factor(const Matrix& m, double scale = 0.0);

// v^T M^{-1} v via one triangular solve: ||L^{-1} v||^2.
double quad_form_inv(std::span<const double> v, const SpdFactor& f);

}  // namespace matchstat
