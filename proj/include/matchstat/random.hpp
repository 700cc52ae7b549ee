#pragma once

#include "matchstat/linalg.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <span>

namespace matchstat {

// SplitMix64 finalizer; used to decorrelate derived seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Seed for the i-th independent consumer: base XOR splitmix64(i).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

// Seeded Gaussian source. The engine is std::mt19937_64, whose output sequence
// is fixed by the standard; uniforms take the top 53 bits and normals use the
// Marsaglia polar transform, so the variate sequence does not depend on the
// standard library's distribution implementations.
//
// Single owner; not thread-safe.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    // Uniform on [0, 1).
    double uniform();
    // Uniform on (-1, 1).
    double uniform_symmetric();
    double std_normal();
    // +1 or -1 with equal probability.
    double rademacher();

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

inline RandomStream normal_stream(std::uint64_t seed) { return RandomStream(seed); }
inline double draw_std_normal(RandomStream& stream) { return stream.std_normal(); }

// mean + L g, g a vector of independent standard normals.
Vector draw_mvn(RandomStream& stream, std::span<const double> mean, const SpdFactor& chol);

}  // namespace matchstat
