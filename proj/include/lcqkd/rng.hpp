#pragma once

#include <complex>
#include <cstdint>

namespace lcqkd {

// Counter-based pseudo-random stream. Every output is a pure function of
// (seed, domain, index, draw counter), so disjoint streams can be consumed
// in any order, or in parallel, and still reproduce bit for bit.
//
// The generator is the SplitMix64 construction: a Weyl sequence on the
// derived key passed through an avalanching finalizer.
class RandomStream {
public:
    // Domain tags keep streams for unrelated purposes disjoint under one seed.
    enum Domain : std::uint64_t {
        kGeneric = 0,
        kRounds = 1,      // one stream per protocol round
        kDisclosure = 2,  // sample positions for error estimation
        kHashing = 3,     // hash diagonal for privacy amplification
        kCodes = 4,       // parity-check construction
        kProbes = 5,      // test-pulse simulation
    };

    RandomStream(std::uint64_t seed, std::uint64_t domain, std::uint64_t index) noexcept;

    std::uint64_t next_u64() noexcept;
    bool next_bit() noexcept;

    // Uniform on (0, 1]; never returns 0, so log() of it is always finite.
    double next_uniform() noexcept;

    // Standard normal via Box-Muller. Pairs are generated together and the
    // spare is cached, so draws alternate between two and zero uniforms.
    double next_normal() noexcept;

    // Complex Gaussian with the given total variance, split evenly between
    // real and imaginary parts.
    std::complex<double> next_complex_normal(double total_variance);

    // Exact Poisson sample by counting unit-exponential arrivals. O(mean),
    // intended for the moderate means that occur in photon-count checks.
    std::uint64_t next_poisson(double mean);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace lcqkd
