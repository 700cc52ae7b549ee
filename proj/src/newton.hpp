#pragma once

#include "matchstat/clr.hpp"

#include <functional>

namespace matchstat::detail {

struct Objective {
    std::function<double(std::span<const double>)> loglik;
    std::function<Vector(std::span<const double>)> score;
    std::function<Matrix(std::span<const double>)> info;
};

// Concave maximization by Newton with step halving. `max_row_norm` feeds the
// separation bound ||beta||_2 > 30 / max_row_norm.
FitResult newton_maximize(const Objective& obj, std::size_t p, std::size_t n, double max_row_norm,
                          const FitOptions& opts);

}  // namespace matchstat::detail
