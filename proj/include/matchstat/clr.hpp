#pragma once

#include "matchstat/classic_tests.hpp"
#include "matchstat/linalg.hpp"
#include "matchstat/matched_data.hpp"

#include <span>
#include <string>

namespace matchstat {

// Conditional logistic regression for 1:1 pairs. With Z_i = case minus
// control, the conditional log-likelihood is
//   L(beta) = -sum_i log(1 + exp(-beta^T Z_i)).

double pair_loglik(std::span<const double> beta, const PairedDifferences& z);
Vector pair_score(std::span<const double> beta, const PairedDifferences& z);
Matrix pair_fisher_info(std::span<const double> beta, const PairedDifferences& z);

// Score test of beta = 0: n Zbar^T Itilde^{-1} Zbar, Itilde = (1/n) sum Z_i Z_i^T.
TestResult score_test(const PairedDifferences& z);

struct FitOptions {
    int max_iter = 50;
    double grad_tol = -1.0;  // <= 0 selects 1e-8 * n
};

struct FitResult {
    Vector beta_hat;
    Matrix info_at_hat;
    double loglik = 0.0;
    int iterations = 0;
    bool converged = false;
    double max_grad_norm = 0.0;
    std::size_t n = 0;       // pairs or strata
    std::string diagnostic;  // empty on success

    // sqrt(diag(info^{-1})); empty if the information is singular.
    Vector standard_errors() const;
};

// Newton-Raphson from beta = 0 with step halving. Non-convergence (including
// suspected separation) is reported through FitResult, not thrown.
FitResult fit_mle(const PairedDifferences& z, const FitOptions& opts = {});

// Both require fit.converged ("MLE unavailable" otherwise).
TestResult wald_test(const FitResult& fit);
TestResult lr_test(const FitResult& fit, const PairedDifferences& z);

}  // namespace matchstat
