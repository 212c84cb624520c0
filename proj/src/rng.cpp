#include "lcqkd/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lcqkd {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t domain,
                           std::uint64_t index) noexcept {
    // Each component is avalanched before combining so that neighbouring
    // (domain, index) pairs land on unrelated keys.
    std::uint64_t k = mix(seed + kGolden);
    k = mix(k ^ mix(domain + 0xD1342543DE82EF95ull));
    key_ = mix(k ^ mix(index + 0x9E6C63D0876A9A75ull));
}

std::uint64_t RandomStream::next_u64() noexcept {
    counter_ += 1;
    return mix(key_ + counter_ * kGolden);
}

bool RandomStream::next_bit() noexcept {
    return (next_u64() >> 63) != 0;
}

double RandomStream::next_uniform() noexcept {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RandomStream::next_normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    const double r = std::sqrt(-2.0 * std::log(next_uniform()));
    const double phi = 2.0 * std::numbers::pi * next_uniform();
    spare_normal_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
}

std::complex<double> RandomStream::next_complex_normal(double total_variance) {
    if (total_variance < 0.0)
        throw std::domain_error("complex normal variance must be non-negative");
    if (total_variance == 0.0) return {0.0, 0.0};
    const double s = std::sqrt(total_variance / 2.0);
    const double re = next_normal();
    const double im = next_normal();
    return {s * re, s * im};
}

std::uint64_t RandomStream::next_poisson(double mean) {
    if (mean < 0.0 || !std::isfinite(mean))
        throw std::domain_error("Poisson mean must be finite and non-negative");
    if (mean > 1e6)
        throw std::domain_error("Poisson mean too large for exact sampling");
    if (mean == 0.0) return 0;
    std::uint64_t n = 0;
    double acc = -std::log(next_uniform());
    while (acc < mean) {
        n += 1;
        acc += -std::log(next_uniform());
    }
    return n;
}

}  // namespace lcqkd
