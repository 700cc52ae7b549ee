#include "matchstat/finite_diff.hpp"

#include "matchstat/error.hpp"

#include <cmath>

namespace matchstat {

Vector finite_diff_grad(const ScalarField& f, std::span<const double> x0, double h) {
    if (!(h > 0.0)) throw Error("finite_diff_grad: step must be positive");
    Vector x(x0.begin(), x0.end());
    Vector grad(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double orig = x[j];
        x[j] = orig + h;
        const double fp = f(x);
        x[j] = orig - h;
        const double fm = f(x);
        x[j] = orig;
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw Error("finite_diff_grad: non-finite function value");
        grad[j] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

Matrix finite_diff_jacobian(const VectorField& g, std::span<const double> x0, double h) {
    if (!(h > 0.0)) throw Error("finite_diff_jacobian: step must be positive");
    Vector x(x0.begin(), x0.end());
    Matrix jac;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double orig = x[j];
        x[j] = orig + h;
        const Vector gp = g(x);
        x[j] = orig - h;
        const Vector gm = g(x);
        x[j] = orig;
        if (j == 0) jac = Matrix(gp.size(), x.size());
        for (std::size_t i = 0; i < gp.size(); ++i) {
            if (!std::isfinite(gp[i]) || !std::isfinite(gm[i]))
                throw Error("finite_diff_jacobian: non-finite function value");
            jac(i, j) = (gp[i] - gm[i]) / (2.0 * h);
        }
    }
    return jac;
}

}  // namespace matchstat
