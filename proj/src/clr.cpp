#include "matchstat/clr.hpp"

#include "matchstat/error.hpp"
#include "matchstat/special.hpp"
#include "newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace matchstat {

namespace {

void check_dim(std::span<const double> beta, const PairedDifferences& z) {
    if (beta.size() != z.dim()) throw Error("beta has wrong dimension");
}

// log(1 + e^{-t}) without overflow.
double log1p_exp_neg(double t) {
    return std::max(0.0, -t) + std::log1p(std::exp(-std::abs(t)));
}

// 1 / (1 + e^{t}).
double logistic_neg(double t) {
    if (t >= 0.0) {
        const double e = std::exp(-t);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(t));
}

double max_row_norm(const PairedDifferences& z) {
    double out = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) out = std::max(out, norm2(z.row(i)));
    return out;
}

}  // namespace

double pair_loglik(std::span<const double> beta, const PairedDifferences& z) {
    check_dim(beta, z);
    double l = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) l -= log1p_exp_neg(dot(beta, z.row(i)));
    return l;
}

Vector pair_score(std::span<const double> beta, const PairedDifferences& z) {
    check_dim(beta, z);
    Vector s(z.dim(), 0.0);
    for (std::size_t i = 0; i < z.size(); ++i) {
        const auto r = z.row(i);
        const double w = logistic_neg(dot(beta, r));
        for (std::size_t j = 0; j < s.size(); ++j) s[j] += w * r[j];
    }
    return s;
}

Matrix pair_fisher_info(std::span<const double> beta, const PairedDifferences& z) {
    check_dim(beta, z);
    const std::size_t p = z.dim();
    Matrix info(p, p);
    for (std::size_t i = 0; i < z.size(); ++i) {
        const auto r = z.row(i);
        const double t = dot(beta, r);
        // e^t / (e^t + 1)^2
        const double w = logistic_neg(t) * logistic_neg(-t);
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t k = 0; k <= j; ++k) info(j, k) += w * r[j] * r[k];
    }
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < j; ++k) info(k, j) = info(j, k);
    return info;
}

TestResult score_test(const PairedDifferences& z) {
    const PairSummary s = summarize(z);
    const SpdFactor factor = [&] {
        try {
            return spd_factor(s.second_moment);
        } catch (const SingularMatrixError&) {
            throw SingularMatrixError("second-moment matrix singular");
        }
    }();
    TestResult r;
    r.method = Method::clr_score;
    r.statistic = static_cast<double>(z.size()) * quad_form_inv(s.mean, factor);
    r.df = static_cast<int>(z.dim());
    r.p_value = chi2_sf(r.statistic, r.df);
    r.n = z.size();
    r.warning = small_sample_warning(z.size(), z.dim());
    return r;
}

Vector FitResult::standard_errors() const {
    if (info_at_hat.rows() == 0) return {};
    try {
        Vector d = spd_factor(info_at_hat).inverse_diagonal();
        for (double& v : d) v = std::sqrt(v);
        return d;
    } catch (const SingularMatrixError&) {
        return {};
    }
}

namespace detail {

namespace {

// Near the optimum the true increase falls below the rounding error of the
// summed log-likelihood; allow a few ulps of apparent decrease.
double ascent_slack(double loglik) {
    return 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(loglik));
}

}  // namespace

FitResult newton_maximize(const Objective& obj, std::size_t p, std::size_t n, double max_row_norm,
                          const FitOptions& opts) {
    constexpr int kMaxHalvings = 30;
    const double grad_tol = opts.grad_tol > 0.0 ? opts.grad_tol : 1e-8 * static_cast<double>(n);
    const double beta_bound = max_row_norm > 0.0 ? 30.0 / max_row_norm : INFINITY;

    FitResult fit;
    fit.n = n;
    fit.beta_hat.assign(p, 0.0);
    fit.loglik = obj.loglik(fit.beta_hat);

    for (int iter = 0;; ++iter) {
        fit.iterations = iter;
        const Vector s = obj.score(fit.beta_hat);
        fit.info_at_hat = obj.info(fit.beta_hat);
        fit.max_grad_norm = norm_inf(s);

        Vector step;
        try {
            step = spd_factor(fit.info_at_hat).solve(s);
        } catch (const SingularMatrixError&) {
            fit.diagnostic = "information matrix singular at current estimate";
            if (norm2(fit.beta_hat) > 0.0) fit.diagnostic += " (possible separation)";
            return fit;
        }
        // A vanishing gradient alone is not enough: along a separating
        // direction the gradient decays like e^{-|beta|} while the Newton
        // step stays O(1).
        if (fit.max_grad_norm < grad_tol && norm_inf(step) <= 1e-6 * (1.0 + norm_inf(fit.beta_hat))) {
            fit.converged = true;
            // One more full Newton step costs little and, in the quadratic
            // regime, takes beta to working precision.
            Vector polished = fit.beta_hat;
            for (std::size_t j = 0; j < p; ++j) polished[j] += step[j];
            const double l = obj.loglik(polished);
            if (l >= fit.loglik - ascent_slack(fit.loglik)) {
                const Vector ps = obj.score(polished);
                if (norm_inf(ps) <= fit.max_grad_norm) {
                    fit.beta_hat = std::move(polished);
                    fit.loglik = l;
                    fit.max_grad_norm = norm_inf(ps);
                    fit.info_at_hat = obj.info(fit.beta_hat);
                }
            }
            return fit;
        }
        if (iter >= opts.max_iter) {
            fit.diagnostic = "possible separation: iteration limit reached";
            return fit;
        }

        double t = 1.0;
        bool accepted = false;
        Vector candidate(p);
        for (int h = 0; h <= kMaxHalvings; ++h, t *= 0.5) {
            for (std::size_t j = 0; j < p; ++j) candidate[j] = fit.beta_hat[j] + t * step[j];
            const double l = obj.loglik(candidate);
            if (l >= fit.loglik - ascent_slack(fit.loglik)) {
                fit.beta_hat = candidate;
                fit.loglik = l;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            fit.iterations = iter + 1;
            fit.diagnostic = "step halving failed to increase the log-likelihood";
            return fit;
        }
        if (norm2(fit.beta_hat) > beta_bound) {
            fit.iterations = iter + 1;
            fit.max_grad_norm = norm_inf(obj.score(fit.beta_hat));
            fit.info_at_hat = obj.info(fit.beta_hat);
            fit.diagnostic = "possible separation: coefficient norm exceeds 30 / max row norm";
            return fit;
        }
    }
}

}  // namespace detail

FitResult fit_mle(const PairedDifferences& z, const FitOptions& opts) {
    detail::Objective obj{
        [&z](std::span<const double> b) { return pair_loglik(b, z); },
        [&z](std::span<const double> b) { return pair_score(b, z); },
        [&z](std::span<const double> b) { return pair_fisher_info(b, z); },
    };
    return detail::newton_maximize(obj, z.dim(), z.size(), max_row_norm(z), opts);
}

TestResult wald_test(const FitResult& fit) {
    if (!fit.converged) throw Error("MLE unavailable: fit did not converge");
    TestResult r;
    r.method = Method::clr_wald;
    r.statistic = std::max(0.0, dot(fit.beta_hat, matvec(fit.info_at_hat, fit.beta_hat)));
    r.df = static_cast<int>(fit.beta_hat.size());
    r.p_value = chi2_sf(r.statistic, r.df);
    r.n = fit.n;
    r.warning = small_sample_warning(fit.n, fit.beta_hat.size());
    return r;
}

TestResult lr_test(const FitResult& fit, const PairedDifferences& z) {
    if (!fit.converged) throw Error("MLE unavailable: fit did not converge");
    const Vector zero(z.dim(), 0.0);
    TestResult r;
    r.method = Method::clr_lr;
    r.statistic = std::max(0.0, 2.0 * (pair_loglik(fit.beta_hat, z) - pair_loglik(zero, z)));
    r.df = static_cast<int>(z.dim());
    r.p_value = chi2_sf(r.statistic, r.df);
    r.n = z.size();
    r.warning = small_sample_warning(z.size(), z.dim());
    return r;
}

}  // namespace matchstat
