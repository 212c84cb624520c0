#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include <doctest.h>

#include "lcqkd/ldpc.hpp"
#include "lcqkd/rng.hpp"

using namespace lcqkd;

namespace {

std::vector<std::uint8_t> random_bits(std::size_t n, RandomStream& rng) {
    std::vector<std::uint8_t> out(n);
    for (auto& b : out) b = rng.next_bit();
    return out;
}

std::vector<std::uint8_t> flip_fraction(std::vector<std::uint8_t> bits, double p,
                                        RandomStream& rng) {
    for (auto& b : bits)
        if (rng.next_uniform() <= p) b ^= 1;
    return bits;
}

std::vector<double> channel_llrs(std::span<const std::uint8_t> bits, double p) {
    const double mag = std::log((1.0 - p) / p);
    std::vector<double> llr(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        llr[i] = (bits[i] ? -mag : mag);
    return llr;
}

// Fraction of noisy blocks recovered exactly at crossover probability p.
int successes(const SyndromeCode& code, double p, int trials, std::uint64_t seed) {
    RandomStream rng(seed, RandomStream::kGeneric, 2);
    int ok = 0;
    for (int t = 0; t < trials; ++t) {
        const auto truth = random_bits(code.n, rng);
        const auto target = code.syndrome(truth);
        const auto noisy = flip_fraction(truth, p, rng);
        const auto llr = channel_llrs(noisy, std::max(p, 1e-4));
        const DecodeResult res = bp_decode(code, llr, target);
        if (res.success && res.bits == truth) ++ok;
    }
    return ok;
}

}  // namespace

TEST_CASE("regular construction has uniform column degree and balanced rows") {
    const SyndromeCode code = SyndromeCode::make_regular(1000, 500, 3, 7);
    CHECK(code.n == 1000);
    CHECK(code.m == 500);
    CHECK(code.rate() == doctest::Approx(0.5).epsilon(1e-15));

    std::vector<int> var_degree(code.n, 0);
    std::size_t edges = 0;
    for (const auto& row : code.check_vars) {
        CHECK(!row.empty());
        for (std::size_t i = 0; i < row.size(); ++i) {
            CHECK(row[i] < code.n);
            if (i > 0) CHECK(row[i] > row[i - 1]);  // ascending, no duplicates
            ++var_degree[row[i]];
            ++edges;
        }
    }
    for (int d : var_degree) CHECK(d == 3);
    CHECK(edges == 3000);
    // Greedy placement keeps row weights tightly clustered around 6.
    for (const auto& row : code.check_vars) {
        CHECK(row.size() >= 4);
        CHECK(row.size() <= 8);
    }
}

TEST_CASE("construction is deterministic in the seed") {
    const SyndromeCode a = SyndromeCode::make_regular(600, 300, 3, 42);
    const SyndromeCode b = SyndromeCode::make_regular(600, 300, 3, 42);
    const SyndromeCode c = SyndromeCode::make_regular(600, 300, 3, 43);
    CHECK(a.check_vars == b.check_vars);
    CHECK(a.check_vars != c.check_vars);
}

TEST_CASE("save and load round-trip the code exactly") {
    const SyndromeCode code = SyndromeCode::make_regular(200, 100, 3, 5);
    std::stringstream buf;
    code.save(buf);
    const SyndromeCode back = SyndromeCode::load(buf);
    CHECK(back.n == code.n);
    CHECK(back.m == code.m);
    CHECK(back.check_vars == code.check_vars);
}

TEST_CASE("syndromes are linear over GF(2)") {
    const SyndromeCode code = SyndromeCode::make_regular(400, 200, 3, 11);
    RandomStream rng(3, RandomStream::kGeneric, 0);
    const auto x = random_bits(code.n, rng);
    const auto y = random_bits(code.n, rng);
    std::vector<std::uint8_t> x_plus_y(code.n);
    for (std::size_t i = 0; i < code.n; ++i) x_plus_y[i] = x[i] ^ y[i];

    const auto sx = code.syndrome(x);
    const auto sy = code.syndrome(y);
    const auto sxy = code.syndrome(x_plus_y);
    CHECK(sx.size() == code.m);
    for (std::size_t j = 0; j < code.m; ++j) CHECK(sxy[j] == (sx[j] ^ sy[j]));

    const std::vector<std::uint8_t> zero(code.n, 0);
    for (std::uint8_t s : code.syndrome(zero)) CHECK(s == 0);
}

TEST_CASE("noiseless blocks decode instantly") {
    const SyndromeCode code = SyndromeCode::make_regular(1000, 500, 3, 100);
    RandomStream rng(9, RandomStream::kGeneric, 0);
    const auto truth = random_bits(code.n, rng);
    const auto target = code.syndrome(truth);
    const auto llr = channel_llrs(truth, 0.01);
    const DecodeResult res = bp_decode(code, llr, target);
    CHECK(res.success);
    CHECK(res.bits == truth);
    CHECK(res.iterations == 0);
}

TEST_CASE("decoding succeeds at the design error rates") {
    // Matches the calibrated family: each block-1000 code must clear its
    // design point nearly always.
    struct Pt {
        std::size_t m;
        std::uint64_t seed;
        double p;
    };
    for (const Pt& pt : {Pt{500, 101, 0.060}, Pt{300, 103, 0.020}}) {
        const SyndromeCode code = SyndromeCode::make_regular(1000, pt.m, 3, pt.seed);
        CHECK(successes(code, pt.p, 50, 1234) >= 49);
    }
}

TEST_CASE("the low-rate code absorbs 10 percent noise but not 20") {
    const SyndromeCode code = SyndromeCode::make_regular(1000, 700, 3, 100);
    CHECK(successes(code, 0.10, 50, 77) >= 49);
    CHECK(successes(code, 0.20, 50, 78) <= 5);
}

TEST_CASE("reported success implies the syndrome actually matches") {
    const SyndromeCode code = SyndromeCode::make_regular(1000, 500, 3, 101);
    RandomStream rng(13, RandomStream::kGeneric, 0);
    for (int t = 0; t < 20; ++t) {
        const auto truth = random_bits(code.n, rng);
        const auto target = code.syndrome(truth);
        const auto noisy = flip_fraction(truth, 0.08, rng);  // past the design point
        const auto llr = channel_llrs(noisy, 0.08);
        const DecodeResult res = bp_decode(code, llr, target);
        if (res.success) CHECK(code.syndrome(res.bits) == target);
    }
}
