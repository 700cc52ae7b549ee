// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.
// Thresholds and runtime budgets are fixed here; nothing is calibrated at run time.

#include "matchstat/classic_tests.hpp"
#include "matchstat/clr.hpp"
#include "matchstat/equivalence.hpp"
#include "matchstat/error.hpp"
#include "matchstat/finite_diff.hpp"
#include "matchstat/special.hpp"
#include "matchstat/strata.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace matchstat;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int g_failures = 0;

void run_criterion(const char* id, const char* title, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < budget_s;
    const bool ok = o.pass && in_time;
    if (!ok) ++g_failures;
    std::printf("[%s] %s %s: %s; %.2f s (budget %.0f s)%s\n", ok ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs,
                budget_s, in_time ? "" : " OVER BUDGET");
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

oracle::Rows to_rows(const PairedDifferences& z) {
    oracle::Rows rows;
    for (std::size_t i = 0; i < z.size(); ++i) rows.emplace_back(z.row(i).begin(), z.row(i).end());
    return rows;
}

// Random 1:1 matched dataset; each predictor column is continuous or binary.
MatchedDataset mixed_pairs(std::mt19937_64& gen, std::size_t n, std::size_t p) {
    std::normal_distribution<double> nd;
    std::bernoulli_distribution coin(0.5);
    std::uniform_real_distribution<double> prob(0.2, 0.8);
    std::vector<bool> binary(p);
    std::vector<double> shift(p), rate(p);
    for (std::size_t j = 0; j < p; ++j) {
        binary[j] = coin(gen);
        shift[j] = 0.3 * nd(gen);
        rate[j] = prob(gen);
    }
    std::vector<Stratum> strata;
    std::vector<std::string> names;
    for (std::size_t j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
    for (std::size_t i = 0; i < n; ++i) {
        Vector xc(p), xk(p);
        for (std::size_t j = 0; j < p; ++j) {
            if (binary[j]) {
                xc[j] = std::bernoulli_distribution(std::min(0.95, rate[j] + 0.1))(gen) ? 1.0 : 0.0;
                xk[j] = std::bernoulli_distribution(rate[j])(gen) ? 1.0 : 0.0;
            } else {
                xc[j] = nd(gen) + shift[j];
                xk[j] = nd(gen);
            }
        }
        Stratum s{"s" + std::to_string(i), {}};
        if (coin(gen)) s.members = {{1, xc}, {0, xk}};
        else s.members = {{0, xk}, {1, xc}};
        strata.push_back(std::move(s));
    }
    return MatchedDataset(std::move(strata), names);
}

Outcome exact_identity() {
    std::mt19937_64 gen(20240101);
    double worst_identity = 0.0, worst_hot = 0.0, worst_sc = 0.0;
    int done = 0, skipped = 0;
    while (done < 1000) {
        const std::size_t p = 1 + done % 4;
        const std::size_t n = std::uniform_int_distribution<std::size_t>(p + 2, 200)(gen);
        const PairedDifferences z = pair_differences(mixed_pairs(gen, n, p));
        double hot, sc;
        try {
            hot = hotelling_paired(z).statistic;
            sc = score_test(z).statistic;
        } catch (const SingularMatrixError&) {
            ++skipped;  // statistic undefined; draw another dataset
            continue;
        }
        const auto rows = to_rows(z);
        const double hot_direct = oracle::hotelling_direct(rows);
        const double sc_direct = oracle::score_direct(rows);
        const double nd = static_cast<double>(n);
        const double predicted = nd * hot / (nd - 1.0 + hot);
        // Relative error; statistics below 1e-12 (a zero mean difference up to
        // rounding) are compared on that absolute scale instead.
        const auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-12); };
        worst_identity = std::max(worst_identity, rel(sc, predicted));
        worst_hot = std::max(worst_hot, rel(hot, hot_direct));
        worst_sc = std::max(worst_sc, rel(sc, sc_direct));
        ++done;
    }
    const bool ok = worst_identity < 1e-10 && worst_hot < 1e-10 && worst_sc < 1e-10;
    return {ok, "1000 datasets (" + std::to_string(skipped) + " singular redrawn); max rel err identity " +
                    fmt("%.2e", worst_identity) + ", hotelling vs direct " + fmt("%.2e", worst_hot) +
                    ", score vs direct " + fmt("%.2e", worst_sc) + " (tol 1e-10)"};
}

Outcome mcnemar_identity() {
    std::mt19937_64 gen(7);
    double worst = 0.0;
    int done = 0;
    while (done < 200) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 200)(gen);
        const double pc = std::uniform_real_distribution<double>(0.05, 0.95)(gen);
        const double pk = std::uniform_real_distribution<double>(0.05, 0.95)(gen);
        std::vector<Stratum> strata;
        for (std::size_t i = 0; i < n; ++i) {
            const double xc = std::bernoulli_distribution(pc)(gen) ? 1.0 : 0.0;
            const double xk = std::bernoulli_distribution(pk)(gen) ? 1.0 : 0.0;
            strata.push_back({"p" + std::to_string(i), {{0, {xk}}, {1, {xc}}}});
        }
        const MatchedDataset ds(std::move(strata), {"x1"});
        const DiscordantCounts counts = discordant_counts(ds);
        if (counts.b + counts.c == 0) continue;
        const double mc = mcnemar(counts).statistic;
        const double sc = score_test(pair_differences(ds)).statistic;
        worst = std::max(worst, std::abs(mc - sc));
        ++done;
    }
    return {worst < 1e-12, "200 binary datasets; max |xi_mc - xi_sc| = " + fmt("%.2e", worst) + " (tol 1e-12)"};
}

Outcome figure_one() {
    bool ok = true;
    std::string detail;
    for (double d : {0.0, 1.0, 2.0, 3.0}) {
        LocalAlternativeSpec spec;
        spec.delta = {d};
        spec.sigma = Matrix::identity(1);
        spec.n = 2000;
        spec.reps = 10000;
        spec.seed = 42;
        const ExperimentReport r = run_equivalence_experiment(spec, 1);
        const bool ks_ok = r.ks_distance < 0.03;
        ok &= ks_ok;
        detail += fmt("delta=%.0f", d) + fmt(" KS=%.4f", r.ks_distance);
        if (d == 0.0) {
            const double mx = *std::max_element(r.k_samples.begin(), r.k_samples.end());
            const double pos = static_cast<double>(std::count_if(r.k_samples.begin(), r.k_samples.end(),
                                                                 [](double v) { return v > 0.0; })) /
                               static_cast<double>(r.k_samples.size());
            const bool b_ok = mx <= 0.25 && std::abs(pos - 0.6827) <= 0.015;
            ok &= b_ok;
            detail += fmt(" maxK=%.4f", mx) + fmt(" P(K>0)=%.4f", pos);
        }
        if (d == 3.0) {
            const double med = r.quantiles[3].limit;
            ok &= med < -10.0;
            detail += fmt(" medianK=%.2f", med);
        }
        detail += "; ";
    }
    detail += "(KS < 0.03, maxK <= 0.25, P(K>0) = 0.6827 +- 0.015, medianK(delta=3) < -10)";
    return {ok, detail};
}

Outcome derivative_checks() {
    std::mt19937_64 gen(99);
    std::normal_distribution<double> nd;
    double worst_grad = 0.0, worst_hess = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t p = 1 + trial % 4;
        const std::size_t n = 2 + trial % 49;
        std::vector<Vector> rows(n, Vector(p));
        for (auto& r : rows)
            for (double& v : r) v = nd(gen) + 0.2;
        const PairedDifferences z = PairedDifferences::from_rows(rows);
        Vector beta(p);
        for (double& v : beta) v = nd(gen);

        const Vector s = pair_score(beta, z);
        const Vector fd = finite_diff_grad([&](std::span<const double> b) { return pair_loglik(b, z); }, beta, 1e-5);
        for (std::size_t j = 0; j < p; ++j) worst_grad = std::max(worst_grad, std::abs(s[j] - fd[j]) / (1 + norm_inf(s)));

        const Matrix info = pair_fisher_info(beta, z);
        const Matrix jac =
            finite_diff_jacobian([&](std::span<const double> b) { return pair_score(b, z); }, beta, 1e-5);
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t k = 0; k < p; ++k)
                worst_hess = std::max(worst_hess, std::abs(info(j, k) + jac(j, k)) / (1 + info.max_abs()));
    }
    return {worst_grad < 1e-5 && worst_hess < 1e-5,
            "100 instances; score vs FD " + fmt("%.2e", worst_grad) + ", info vs -FD Jacobian " +
                fmt("%.2e", worst_hess) + " (tol 1e-5, relative to 1 + max|.|)"};
}

Outcome strata_oracle() {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> nd;
    double worst_ll = 0.0, worst_score = 0.0, worst_pair = 0.0;
    int cases = 0;
    for (std::size_t m = 2; m <= 8; ++m) {
        for (std::size_t k = 1; k < m; ++k) {
            for (int draw = 0; draw < 50; ++draw, ++cases) {
                const std::size_t p = 1 + draw % 3;
                std::vector<Stratum> strata;
                for (int s = 0; s < 2; ++s) {
                    std::vector<int> labels(m, 0);
                    std::fill(labels.begin(), labels.begin() + static_cast<long>(k), 1);
                    std::shuffle(labels.begin(), labels.end(), gen);
                    Stratum st{"s" + std::to_string(s), {}};
                    for (std::size_t i = 0; i < m; ++i) {
                        Vector x(p);
                        for (double& v : x) v = nd(gen);
                        st.members.push_back({labels[i], x});
                    }
                    strata.push_back(std::move(st));
                }
                std::vector<std::string> names;
                for (std::size_t j = 0; j < p; ++j) names.push_back("x" + std::to_string(j));
                const MatchedDataset ds(std::move(strata), names);
                Vector beta(p);
                for (double& v : beta) v = nd(gen);

                const double bf = strata_loglik_bruteforce(beta, ds);
                const double rc = strata_loglik_recursive(beta, ds);
                worst_ll = std::max(worst_ll, std::abs(rc - bf) / std::max(1.0, std::abs(bf)));
                const Vector sb = strata_score_bruteforce(beta, ds);
                const Vector sr = strata_score_recursive(beta, ds);
                for (std::size_t j = 0; j < p; ++j)
                    worst_score = std::max(worst_score, std::abs(sr[j] - sb[j]) / std::max(1.0, norm_inf(sb)));
                if (m == 2) {
                    const double pl = pair_loglik(beta, pair_differences(ds));
                    worst_pair = std::max(worst_pair, std::abs(rc - pl) / std::max(1.0, std::abs(pl)));
                    worst_pair = std::max(worst_pair, std::abs(bf - pl) / std::max(1.0, std::abs(pl)));
                }
            }
        }
    }
    const bool ok = worst_ll < 1e-12 && worst_score < 1e-12 && worst_pair < 1e-12;
    return {ok, std::to_string(cases) + " draws over all (m,k), m<=8; rel err loglik " + fmt("%.2e", worst_ll) +
                    ", score " + fmt("%.2e", worst_score) + ", m=2 vs pair_loglik " + fmt("%.2e", worst_pair) +
                    " (tol 1e-12)"};
}

Outcome trinity() {
    auto mean_gaps = [](std::size_t n) {
        LocalAlternativeSpec spec;
        spec.delta = {0.0};
        spec.sigma = Matrix::identity(1);
        spec.n = n;
        spec.reps = 500;
        spec.seed = 2718 + n;
        double wald_gap = 0.0, lr_gap = 0.0;
        for (std::size_t r = 0; r < spec.reps; ++r) {
            const PairedDifferences z = generate_local_alternative(spec, r);
            const double sc = score_test(z).statistic;
            const FitResult fit = fit_mle(z);
            if (!fit.converged) throw Error("fit failed on Gaussian null data: " + fit.diagnostic);
            wald_gap += std::abs(wald_test(fit).statistic - sc);
            lr_gap += std::abs(lr_test(fit, z).statistic - sc);
        }
        return std::pair{wald_gap / spec.reps, lr_gap / spec.reps};
    };
    const auto [w200, l200] = mean_gaps(200);
    const auto [w2000, l2000] = mean_gaps(2000);
    const bool ok = w2000 < 0.5 * w200 && l2000 < 0.5 * l200;
    return {ok, "mean|wald-sc| " + fmt("%.4g", w200) + " -> " + fmt("%.4g", w2000) + ", mean|lr-sc| " +
                    fmt("%.4g", l200) + " -> " + fmt("%.4g", l2000) + " (n=200 -> 2000; need ratio < 0.5)"};
}

Outcome special_functions() {
    const double a = chi2_sf(3.841459, 1);
    const double b = chi2_sf(5.991465, 2);
    const double oa = oracle::chi2_sf(3.841459, 1);
    const double ob = oracle::chi2_sf(5.991465, 2);
    double worst_exp = 0.0;
    for (double x = 0.0; x <= 100.0; x += 0.01) worst_exp = std::max(worst_exp, std::abs(chi2_sf(x, 2) - std::exp(-x / 2)));
    const bool ok = std::abs(a - 0.05) < 1e-4 && std::abs(b - 0.05) < 1e-4 && std::abs(a - oa) < 1e-10 &&
                    std::abs(b - ob) < 1e-10 && worst_exp < 1e-12;
    return {ok, fmt("chi2_sf(3.841459,1)=%.8f", a) + fmt(" (oracle %.8f)", oa) + fmt(", chi2_sf(5.991465,2)=%.8f", b) +
                    fmt(" (oracle %.8f)", ob) + fmt("; max |chi2_sf(x,2)-exp(-x/2)| = %.2e on [0,100]", worst_exp)};
}

}  // namespace

int main() {
    run_criterion("AC1", "exact finite-sample identity xi_sc = n xi_hot/(n-1+xi_hot)", 5.0, exact_identity);
    run_criterion("AC2", "McNemar equals CLR score", 1.0, mcnemar_identity);
    run_criterion("AC3", "Figure-1 reproduction", 60.0, figure_one);
    run_criterion("AC4", "gradient/Hessian finite differences", 2.0, derivative_checks);
    run_criterion("AC5", "strata recursion vs brute-force enumeration", 10.0, strata_oracle);
    run_criterion("AC6", "Wald/LR/score asymptotic agreement", 120.0, trinity);
    run_criterion("AC7", "special-function spot checks", 5.0, special_functions);
    std::printf("%s: %d criterion(s) failed\n", g_failures == 0 ? "ACCEPTED" : "REJECTED", g_failures);
    return g_failures == 0 ? 0 : 1;
}
