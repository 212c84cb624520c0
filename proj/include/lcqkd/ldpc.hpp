#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace lcqkd {

// Sparse parity-check code used for syndrome reconciliation. Stored as the
// row-index list: one check node per line, space-separated variable indices.
struct SyndromeCode {
    std::size_t n = 0;  // variable nodes (block length)
    std::size_t m = 0;  // check nodes (syndrome length)
    std::vector<std::vector<std::uint32_t>> check_vars;  // per check, ascending

    // Regular code with uniform variable degree. Edges are placed check by
    // check from a seeded pseudo-random permutation stream, greedily avoiding
    // short cycles (progressive edge growth).
    static SyndromeCode make_regular(std::size_t n, std::size_t m,
                                     unsigned var_degree, std::uint64_t seed);

    static SyndromeCode load(std::istream& in);
    void save(std::ostream& out) const;

    double rate() const {
        return 1.0 - static_cast<double>(m) / static_cast<double>(n);
    }

    std::vector<std::uint8_t> syndrome(std::span<const std::uint8_t> bits) const;
};

struct DecodeResult {
    std::vector<std::uint8_t> bits;
    bool success = false;
    unsigned iterations = 0;
};

// Sum-product decoding toward a target syndrome, layered schedule. llr[i] is
// log(P(x_i = 0) / P(x_i = 1)) from the channel. Stops early as soon as the
// hard decision matches the target syndrome.
DecodeResult bp_decode(const SyndromeCode& code, std::span<const double> llr,
                       std::span<const std::uint8_t> target_syndrome,
                       unsigned max_iterations = 100);

}  // namespace lcqkd
