#pragma once

#include "matchstat/linalg.hpp"

#include <functional>
#include <span>

namespace matchstat {

using ScalarField = std::function<double(std::span<const double>)>;
using VectorField = std::function<Vector(std::span<const double>)>;

// Central differences (f(x0 + h e_j) - f(x0 - h e_j)) / (2h).
Vector finite_diff_grad(const ScalarField& f, std::span<const double> x0, double h);

// Central-difference Jacobian; entry (i, j) = d g_i / d x_j.
Matrix finite_diff_jacobian(const VectorField& g, std::span<const double> x0, double h);

}  // namespace matchstat
