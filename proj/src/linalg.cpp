#include "matchstat/linalg.hpp"

#include "matchstat/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace matchstat {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw Error(std::string("dimension mismatch in ") + what + ": " + std::to_string(a) +
                    " vs " + std::to_string(b));
    }
}

}  // namespace

Matrix Matrix::identity(std::size_t p) {
    Matrix m(p, p);
    for (std::size_t i = 0; i < p; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        require_same_size(rows[i].size(), m.cols(), "Matrix::from_rows");
        std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
}

double Matrix::max_abs() const noexcept {
    double out = 0.0;
    for (double v : data_) out = std::max(out, std::abs(v));
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    require_same_size(a.size(), b.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_inf(std::span<const double> v) noexcept {
    double out = 0.0;
    for (double x : v) out = std::max(out, std::abs(x));
    return out;
}

double norm2(std::span<const double> v) noexcept {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    require_same_size(a.cols(), b.rows(), "matmul");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

Vector matvec(const Matrix& a, std::span<const double> v) {
    require_same_size(a.cols(), v.size(), "matvec");
    Vector out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), v);
    return out;
}

SpdFactor spd_factor(const Matrix& m, double scale) {
    require_same_size(m.rows(), m.cols(), "spd_factor");
    const std::size_t p = m.rows();
    if (p == 0) throw Error("spd_factor: empty matrix");

    const double sym_tol = 1e-12 * (1.0 + m.max_abs());
    double max_diag = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        if (!std::isfinite(m(i, i))) throw Error("spd_factor: non-finite entry");
        max_diag = std::max(max_diag, std::abs(m(i, i)));
        for (std::size_t j = 0; j < i; ++j) {
            if (std::abs(m(i, j) - m(j, i)) > sym_tol) throw Error("spd_factor: matrix not symmetric");
        }
    }
    const double pivot_tol = static_cast<double>(p) * 1e-12 * std::max(max_diag, scale);

    Matrix l(p, p);
    for (std::size_t j = 0; j < p; ++j) {
        double d = m(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > pivot_tol)) throw SingularMatrixError("matrix not positive definite");
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < p; ++i) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return SpdFactor(std::move(l));
}

Vector SpdFactor::forward_solve(std::span<const double> b) const {
    require_same_size(b.size(), dim(), "forward_solve");
    const std::size_t p = dim();
    Vector y(b.begin(), b.end());
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t k = 0; k < i; ++k) y[i] -= lower_(i, k) * y[k];
        y[i] /= lower_(i, i);
    }
    return y;
}

Vector SpdFactor::solve(std::span<const double> b) const {
    Vector x = forward_solve(b);
    const std::size_t p = dim();
    for (std::size_t ii = p; ii-- > 0;) {
        for (std::size_t k = ii + 1; k < p; ++k) x[ii] -= lower_(k, ii) * x[k];
        x[ii] /= lower_(ii, ii);
    }
    return x;
}

Vector SpdFactor::apply_lower(std::span<const double> v) const {
    require_same_size(v.size(), dim(), "apply_lower");
    Vector out(dim(), 0.0);
    for (std::size_t i = 0; i < dim(); ++i)
        for (std::size_t k = 0; k <= i; ++k) out[i] += lower_(i, k) * v[k];
    return out;
}

Vector SpdFactor::inverse_diagonal() const {
    const std::size_t p = dim();
    Vector out(p);
    Vector e(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        e[j] = 1.0;
        out[j] = solve(e)[j];
        e[j] = 0.0;
    }
    return out;
}

double quad_form_inv(std::span<const double> v, const SpdFactor& f) {
    const Vector y = f.forward_solve(v);
    double s = 0.0;
    for (double x : y) s += x * x;
    return s;
}

}  // namespace matchstat
