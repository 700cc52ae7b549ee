#include "matchstat/equivalence.hpp"

#include "matchstat/classic_tests.hpp"
#include "matchstat/clr.hpp"
#include "matchstat/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

namespace matchstat {

std::string_view noise_family_name(NoiseFamily f) noexcept {
    switch (f) {
        case NoiseFamily::gaussian: return "gaussian";
        case NoiseFamily::uniform_scaled: return "uniform_scaled";
        case NoiseFamily::rademacher_mix: return "rademacher_mix";
    }
    return "unknown";
}

NoiseFamily parse_noise_family(std::string_view name) {
    if (name == "gaussian") return NoiseFamily::gaussian;
    if (name == "uniform_scaled" || name == "uniform") return NoiseFamily::uniform_scaled;
    if (name == "rademacher_mix" || name == "rademacher") return NoiseFamily::rademacher_mix;
    throw Error("unknown noise family '" + std::string(name) + "'");
}

void validate(const LocalAlternativeSpec& spec) {
    const std::size_t p = spec.delta.size();
    if (p == 0) throw Error("delta must be nonempty");
    if (spec.sigma.rows() != p || spec.sigma.cols() != p)
        throw Error("sigma must be " + std::to_string(p) + "x" + std::to_string(p));
    for (double d : spec.delta)
        if (!std::isfinite(d)) throw Error("delta must be finite");
    if (spec.n < 2) throw Error("n must be at least 2");
    if (spec.reps < 1) throw Error("reps must be at least 1");
    try {
        spd_factor(spec.sigma);
    } catch (const SingularMatrixError&) {
        throw Error("sigma is not positive definite");
    }
}

namespace {

double standardized_draw(RandomStream& rs, NoiseFamily f) {
    switch (f) {
        case NoiseFamily::gaussian: return rs.std_normal();
        // U(-sqrt 3, sqrt 3) has unit variance.
        case NoiseFamily::uniform_scaled: return std::sqrt(3.0) * rs.uniform_symmetric();
        case NoiseFamily::rademacher_mix: return rs.rademacher();
    }
    return 0.0;
}

PairedDifferences generate_with(const LocalAlternativeSpec& spec, const SpdFactor& chol,
                                std::size_t replicate) {
    const std::size_t p = spec.delta.size();
    RandomStream rs(derive_seed(spec.seed, replicate));
    const double root_n = std::sqrt(static_cast<double>(spec.n));
    Vector shift(p);
    for (std::size_t j = 0; j < p; ++j) shift[j] = spec.delta[j] / root_n;

    Matrix z(spec.n, p);
    Vector e(p);
    for (std::size_t i = 0; i < spec.n; ++i) {
        for (double& v : e) v = standardized_draw(rs, spec.noise);
        const Vector w = chol.apply_lower(e);
        for (std::size_t j = 0; j < p; ++j) z(i, j) = shift[j] + w[j];
    }
    return PairedDifferences(std::move(z));
}

}  // namespace

PairedDifferences generate_local_alternative(const LocalAlternativeSpec& spec, std::size_t replicate) {
    validate(spec);
    return generate_with(spec, spd_factor(spec.sigma), replicate);
}

double scaled_difference(const PairedDifferences& z) {
    const double sc = score_test(z).statistic;
    const double hot = hotelling_paired(z).statistic;
    return static_cast<double>(z.size()) * (sc - hot);
}

double limit_k(std::span<const double> u, const SpdFactor& sigma) {
    const double q = quad_form_inv(u, sigma);
    return q - q * q;
}

std::vector<double> sample_k(std::span<const double> delta, const Matrix& sigma, std::size_t reps,
                             const std::function<Vector()>& draw_v) {
    const SpdFactor chol = spd_factor(sigma);
    if (delta.size() != chol.dim()) throw Error("sample_k: delta and sigma dimensions differ");
    std::vector<double> out;
    out.reserve(reps);
    Vector u(delta.size());
    for (std::size_t r = 0; r < reps; ++r) {
        const Vector v = draw_v();
        if (v.size() != delta.size()) throw Error("sample_k: draw has wrong dimension");
        for (std::size_t j = 0; j < u.size(); ++j) u[j] = delta[j] + v[j];
        out.push_back(limit_k(u, chol));
    }
    return out;
}

std::vector<double> sample_k(std::span<const double> delta, const Matrix& sigma, std::size_t reps,
                             std::uint64_t seed) {
    const SpdFactor chol = spd_factor(sigma);
    RandomStream rs(seed);
    const Vector zero(delta.size(), 0.0);
    return sample_k(delta, sigma, reps, [&] { return draw_mvn(rs, zero, chol); });
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw Error("ks_statistic: samples must be nonempty");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        // Step past every copy of the smallest remaining value in both samples
        // before comparing, so ties do not create spurious gaps.
        const double x = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] == x) ++i;
        while (j < sb.size() && sb[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double quantile_sorted(std::span<const double> sorted, double level) {
    if (sorted.empty()) throw Error("quantile of empty sample");
    if (!(level >= 0.0 && level <= 1.0)) throw Error("quantile level must lie in [0, 1]");
    const double h = level * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

HistogramData histogram(std::span<const double> samples, std::size_t bin_count, double lo, double hi) {
    if (bin_count < 1) throw Error("histogram needs at least one bin");
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw Error("histogram range must be finite");
    if (!(hi > lo)) throw Error("histogram range has zero width");
    HistogramData h;
    h.edges.resize(bin_count + 1);
    const double width = (hi - lo) / static_cast<double>(bin_count);
    for (std::size_t i = 0; i <= bin_count; ++i) h.edges[i] = lo + width * static_cast<double>(i);
    h.edges.back() = hi;
    h.counts.assign(bin_count, 0);
    for (double x : samples) {
        if (!(x >= lo && x <= hi)) continue;
        auto bin = static_cast<std::size_t>((x - lo) / width);
        bin = std::min(bin, bin_count - 1);
        // Guard against rounding in the division placing x one bin off.
        while (bin > 0 && x < h.edges[bin]) --bin;
        while (bin + 1 < bin_count && x >= h.edges[bin + 1]) ++bin;
        ++h.counts[bin];
    }
    h.densities.resize(bin_count);
    const double total = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < bin_count; ++i) {
        const double w = h.edges[i + 1] - h.edges[i];
        h.densities[i] = total > 0 ? static_cast<double>(h.counts[i]) / (total * w) : 0.0;
    }
    return h;
}

HistogramData histogram(std::span<const double> samples, std::size_t bin_count) {
    if (samples.empty()) throw Error("histogram of empty sample needs an explicit range");
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    return histogram(samples, bin_count, *mn, *mx);
}

unsigned default_thread_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MATCHSTAT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(std::min<long>(v, hw));
    }
    return hw;
}

ExperimentReport run_equivalence_experiment(const LocalAlternativeSpec& spec, unsigned threads) {
    validate(spec);
    const SpdFactor chol = spd_factor(spec.sigma);
    if (threads == 0) threads = default_thread_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, spec.reps));

    std::vector<double> values(spec.reps, 0.0);
    std::vector<char> degenerate(spec.reps, 0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next.fetch_add(1); r < spec.reps; r = next.fetch_add(1)) {
            const PairedDifferences z = generate_with(spec, chol, r);
            try {
                values[r] = scaled_difference(z);
            } catch (const SingularMatrixError&) {
                degenerate[r] = 1;
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    ExperimentReport report;
    report.spec = spec;
    report.empirical.reserve(spec.reps);
    for (std::size_t r = 0; r < spec.reps; ++r) {
        if (degenerate[r]) ++report.degenerate_count;
        else report.empirical.push_back(values[r]);
    }
    if (report.degenerate_count * 10 > spec.reps)
        throw Error("experiment degenerate: " + std::to_string(report.degenerate_count) + " of " +
                    std::to_string(spec.reps) + " replicates had singular covariance");

    // Index reps is never used by a replicate, so the K stream is independent.
    report.k_samples = sample_k(spec.delta, spec.sigma, spec.reps, derive_seed(spec.seed, spec.reps));
    report.ks_distance = ks_statistic(report.empirical, report.k_samples);

    std::vector<double> se = report.empirical;
    std::vector<double> sk = report.k_samples;
    std::sort(se.begin(), se.end());
    std::sort(sk.begin(), sk.end());
    for (double level : kReportQuantiles)
        report.quantiles.push_back({level, quantile_sorted(se, level), quantile_sorted(sk, level)});
    return report;
}

}  // namespace matchstat
