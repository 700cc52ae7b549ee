#include "matchstat/strata.hpp"

#include "matchstat/error.hpp"
#include "newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace matchstat {

namespace {

void check_stratum(const Stratum& s, std::size_t p, std::span<const double> beta) {
    if (beta.size() != p) throw Error("beta has wrong dimension");
    const std::size_t k = s.case_count();
    if (k == 0 || k == s.size())
        throw Error("stratum " + s.id + " carries no information (k = 0 or k = m)");
}

Vector linear_predictors(std::span<const double> beta, const Stratum& s) {
    Vector eta(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) eta[j] = dot(beta, s.members[j].x);
    return eta;
}

// Visits every size-k subset of {0, ..., m-1} in lexicographic order.
template <typename Visit>
void for_each_subset(std::size_t m, std::size_t k, Visit&& visit) {
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    while (true) {
        visit(std::span<const std::size_t>(idx));
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == m - k + (i - 1)) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

struct SubsetSums {
    std::vector<double> log_weight;  // sum of eta over the subset
    std::vector<Vector> x_sum;       // sum of x over the subset
};

SubsetSums enumerate_stratum(const Stratum& s, const Vector& eta, bool with_x) {
    if (s.size() > kBruteForceMaxStratum)
        throw Error("stratum " + s.id + " has " + std::to_string(s.size()) +
                    " members; brute-force enumeration is limited to " +
                    std::to_string(kBruteForceMaxStratum));
    const std::size_t k = s.case_count();
    const std::size_t p = s.members.front().x.size();
    SubsetSums out;
    for_each_subset(s.size(), k, [&](std::span<const std::size_t> subset) {
        double w = 0.0;
        for (std::size_t j : subset) w += eta[j];
        out.log_weight.push_back(w);
        if (with_x) {
            Vector xs(p, 0.0);
            for (std::size_t j : subset)
                for (std::size_t d = 0; d < p; ++d) xs[d] += s.members[j].x[d];
            out.x_sum.push_back(std::move(xs));
        }
    });
    return out;
}

double log_sum_exp(const std::vector<double>& v) {
    const double mx = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

double case_eta_sum(const Stratum& s, const Vector& eta) {
    double num = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j)
        if (s.members[j].y == 1) num += eta[j];
    return num;
}

double max_within_stratum_spread(const MatchedDataset& dataset) {
    double out = 0.0;
    for (const auto& s : dataset.strata()) {
        for (std::size_t a = 0; a < s.size(); ++a)
            for (std::size_t b = a + 1; b < s.size(); ++b) {
                double d2 = 0.0;
                for (std::size_t j = 0; j < dataset.dim(); ++j) {
                    const double d = s.members[a].x[j] - s.members[b].x[j];
                    d2 += d * d;
                }
                out = std::max(out, std::sqrt(d2));
            }
    }
    return out;
}

}  // namespace

double strata_loglik_bruteforce(std::span<const double> beta, const MatchedDataset& dataset) {
    double total = 0.0;
    for (const auto& s : dataset.strata()) {
        check_stratum(s, dataset.dim(), beta);
        const Vector eta = linear_predictors(beta, s);
        const SubsetSums sums = enumerate_stratum(s, eta, false);
        total += case_eta_sum(s, eta) - log_sum_exp(sums.log_weight);
    }
    return total;
}

Vector strata_score_bruteforce(std::span<const double> beta, const MatchedDataset& dataset) {
    const std::size_t p = dataset.dim();
    Vector score(p, 0.0);
    for (const auto& s : dataset.strata()) {
        check_stratum(s, p, beta);
        const Vector eta = linear_predictors(beta, s);
        const SubsetSums sums = enumerate_stratum(s, eta, true);
        const double lse = log_sum_exp(sums.log_weight);
        for (const auto& o : s.members)
            if (o.y == 1)
                for (std::size_t d = 0; d < p; ++d) score[d] += o.x[d];
        for (std::size_t i = 0; i < sums.log_weight.size(); ++i) {
            const double prob = std::exp(sums.log_weight[i] - lse);
            for (std::size_t d = 0; d < p; ++d) score[d] -= prob * sums.x_sum[i][d];
        }
    }
    return score;
}

StrataDerivatives strata_evaluate_recursive(std::span<const double> beta, const MatchedDataset& dataset,
                                            bool with_info) {
    const std::size_t p = dataset.dim();
    StrataDerivatives out;
    out.score.assign(p, 0.0);
    if (with_info) out.info = Matrix(p, p);

    for (const auto& s : dataset.strata()) {
        check_stratum(s, p, beta);
        const std::size_t m = s.size();
        const std::size_t k = s.case_count();
        const Vector eta = linear_predictors(beta, s);
        const double shift = *std::max_element(eta.begin(), eta.end());

        // b[r]: elementary symmetric polynomial e_r of the shifted weights over
        // the members seen so far; g[r], h[r]: its gradient and Hessian in beta.
        std::vector<double> b(k + 1, 0.0);
        std::vector<Vector> g(k + 1, Vector(p, 0.0));
        std::vector<Matrix> h(with_info ? k + 1 : 0, Matrix(p, p));
        b[0] = 1.0;

        for (std::size_t j = 0; j < m; ++j) {
            const double w = std::exp(eta[j] - shift);
            const Vector& x = s.members[j].x;
            for (std::size_t r = std::min(j + 1, k); r >= 1; --r) {
                if (with_info) {
                    for (std::size_t a = 0; a < p; ++a)
                        for (std::size_t c = 0; c < p; ++c)
                            h[r](a, c) += w * (x[a] * x[c] * b[r - 1] + x[a] * g[r - 1][c] +
                                               g[r - 1][a] * x[c] + h[r - 1](a, c));
                }
                for (std::size_t a = 0; a < p; ++a) g[r][a] += w * (x[a] * b[r - 1] + g[r - 1][a]);
                b[r] += w * b[r - 1];
            }
        }

        out.loglik += case_eta_sum(s, eta) - (std::log(b[k]) + static_cast<double>(k) * shift);
        Vector mean_x(p);
        for (std::size_t a = 0; a < p; ++a) mean_x[a] = g[k][a] / b[k];
        for (const auto& o : s.members)
            if (o.y == 1)
                for (std::size_t a = 0; a < p; ++a) out.score[a] += o.x[a];
        for (std::size_t a = 0; a < p; ++a) out.score[a] -= mean_x[a];
        if (with_info) {
            for (std::size_t a = 0; a < p; ++a)
                for (std::size_t c = 0; c < p; ++c)
                    out.info(a, c) += h[k](a, c) / b[k] - mean_x[a] * mean_x[c];
        }
    }
    if (with_info) {
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t c = 0; c < a; ++c) {
                const double avg = 0.5 * (out.info(a, c) + out.info(c, a));
                out.info(a, c) = avg;
                out.info(c, a) = avg;
            }
    }
    return out;
}

double strata_loglik_recursive(std::span<const double> beta, const MatchedDataset& dataset) {
    return strata_evaluate_recursive(beta, dataset, false).loglik;
}

Vector strata_score_recursive(std::span<const double> beta, const MatchedDataset& dataset) {
    return strata_evaluate_recursive(beta, dataset, false).score;
}

Matrix strata_info_recursive(std::span<const double> beta, const MatchedDataset& dataset) {
    return strata_evaluate_recursive(beta, dataset, true).info;
}

FitResult fit_strata_mle(const MatchedDataset& dataset, const FitOptions& opts) {
    detail::Objective obj{
        [&dataset](std::span<const double> b) { return strata_loglik_recursive(b, dataset); },
        [&dataset](std::span<const double> b) { return strata_score_recursive(b, dataset); },
        [&dataset](std::span<const double> b) { return strata_info_recursive(b, dataset); },
    };
    return detail::newton_maximize(obj, dataset.dim(), dataset.strata().size(),
                                   max_within_stratum_spread(dataset), opts);
}

}  // namespace matchstat
