#include "matchstat/random.hpp"

#include "matchstat/error.hpp"

#include <cmath>

namespace matchstat {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    return base ^ splitmix64(index);
}

double RandomStream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_symmetric() {
    double u;
    do {
        u = 2.0 * uniform() - 1.0;
    } while (u == -1.0);
    return u;
}

double RandomStream::std_normal() {
    if (spare_) {
        const double out = *spare_;
        spare_.reset();
        return out;
    }
    double u, v, s;
    do {
        u = uniform_symmetric();
        v = uniform_symmetric();
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    return u * f;
}

double RandomStream::rademacher() {
    return (engine_() >> 63) != 0 ? 1.0 : -1.0;
}

Vector draw_mvn(RandomStream& stream, std::span<const double> mean, const SpdFactor& chol) {
    if (mean.size() != chol.dim()) throw Error("draw_mvn: dimension mismatch");
    Vector g(chol.dim());
    for (double& x : g) x = stream.std_normal();
    Vector out = chol.apply_lower(g);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += mean[i];
    return out;
}

}  // namespace matchstat
