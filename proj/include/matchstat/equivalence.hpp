#pragma once

#include "matchstat/linalg.hpp"
#include "matchstat/matched_data.hpp"
#include "matchstat/random.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

namespace matchstat {

// Monte Carlo comparison of n (xi_sc - xi_hot) with its limit
//   K = u^T Sigma^{-1} (Sigma - u u^T) Sigma^{-1} u,   u = delta + V,  V ~ N(0, Sigma)
// under local alternatives Z_i = delta / sqrt(n) + W_i, W_i iid mean 0, covariance Sigma.

enum class NoiseFamily { gaussian, uniform_scaled, rademacher_mix };

std::string_view noise_family_name(NoiseFamily f) noexcept;
NoiseFamily parse_noise_family(std::string_view name);

struct LocalAlternativeSpec {
    Vector delta;
    Matrix sigma;
    NoiseFamily noise = NoiseFamily::gaussian;
    std::size_t n = 0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
};

// Throws Error unless dimensions agree, n >= 2, reps >= 1 and Sigma is SPD.
void validate(const LocalAlternativeSpec& spec);

// Rows delta / sqrt(n) + L e_i with L L^T = Sigma and e_i iid standardized
// draws of the chosen family. Stream seed: derive_seed(spec.seed, replicate).
PairedDifferences generate_local_alternative(const LocalAlternativeSpec& spec, std::size_t replicate);

// n * (score statistic - Hotelling statistic); propagates SingularMatrixError.
double scaled_difference(const PairedDifferences& z);

// K for one draw u = delta + V, evaluated as q - q^2 with q = u^T Sigma^{-1} u.
double limit_k(std::span<const double> u, const SpdFactor& sigma);

std::vector<double> sample_k(std::span<const double> delta, const Matrix& sigma, std::size_t reps,
                             std::uint64_t seed);
// Same, with V supplied by the caller.
std::vector<double> sample_k(std::span<const double> delta, const Matrix& sigma, std::size_t reps,
                             const std::function<Vector()>& draw_v);

// Two-sample Kolmogorov-Smirnov distance sup |F_a - F_b|.
double ks_statistic(std::span<const double> a, std::span<const double> b);

// Type-7 (linear interpolation) sample quantile; `sorted` must be ascending.
double quantile_sorted(std::span<const double> sorted, double level);

struct HistogramData {
    std::vector<double> edges;  // bin_count + 1
    std::vector<std::size_t> counts;
    std::vector<double> densities;  // count / (total samples * width)
};

// Half-open bins [e_i, e_{i+1}); the last bin also includes its right edge.
// Without an explicit range the sample [min, max] is used.
HistogramData histogram(std::span<const double> samples, std::size_t bin_count);
HistogramData histogram(std::span<const double> samples, std::size_t bin_count, double lo, double hi);

inline constexpr std::array<double, 7> kReportQuantiles{0.01, 0.05, 0.25, 0.50, 0.75, 0.95, 0.99};

struct QuantileRow {
    double level = 0.0;
    double empirical = 0.0;
    double limit = 0.0;
};

struct ExperimentReport {
    LocalAlternativeSpec spec;
    std::vector<double> empirical;  // n (xi_sc - xi_hot), replicate order, degenerate skipped
    std::vector<double> k_samples;
    double ks_distance = 0.0;
    std::vector<QuantileRow> quantiles;
    std::size_t degenerate_count = 0;
};

// Worker count from MATCHSTAT_THREADS, else hardware concurrency (>= 1).
unsigned default_thread_count();

// Replicates run on up to `threads` workers; results are ordered by replicate
// index so the report does not depend on the thread count. More than 10%
// degenerate replicates is an error.
ExperimentReport run_equivalence_experiment(const LocalAlternativeSpec& spec, unsigned threads = 0);

}  // namespace matchstat
