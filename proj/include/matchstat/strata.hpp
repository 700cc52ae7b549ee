#pragma once

#include "matchstat/clr.hpp"
#include "matchstat/linalg.hpp"
#include "matchstat/matched_data.hpp"

#include <span>

namespace matchstat {

// Conditional log-likelihood for strata of any size m with k cases:
//   sum over strata of  sum_{cases} beta^T x  -  log sum_{|J| = k} exp(sum_{j in J} beta^T x_j).
// Every stratum must satisfy 1 <= k <= m - 1.

inline constexpr std::size_t kBruteForceMaxStratum = 20;

// Enumerates all C(m, k) subsets; refuses strata larger than kBruteForceMaxStratum.
double strata_loglik_bruteforce(std::span<const double> beta, const MatchedDataset& dataset);
Vector strata_score_bruteforce(std::span<const double> beta, const MatchedDataset& dataset);

struct StrataDerivatives {
    double loglik = 0.0;
    Vector score;
    Matrix info;  // negative Hessian; empty unless requested
};

// Elementary-symmetric-polynomial recursion, O(m k) per stratum (O(m k p^2)
// with the information matrix).
StrataDerivatives strata_evaluate_recursive(std::span<const double> beta, const MatchedDataset& dataset,
                                            bool with_info);
double strata_loglik_recursive(std::span<const double> beta, const MatchedDataset& dataset);
Vector strata_score_recursive(std::span<const double> beta, const MatchedDataset& dataset);
Matrix strata_info_recursive(std::span<const double> beta, const MatchedDataset& dataset);

// Newton fit of the general-strata likelihood; same conventions as fit_mle,
// with n the number of strata.
FitResult fit_strata_mle(const MatchedDataset& dataset, const FitOptions& opts = {});

}  // namespace matchstat
