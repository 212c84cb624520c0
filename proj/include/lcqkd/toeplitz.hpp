#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lcqkd {

// 2-universal hash by a random Toeplitz matrix over GF(2). With input length
// l1 and output length l2, the matrix is defined by l1 + l2 - 1 diagonal
// bits: entry (i, j) = diagonal_bits[i - j + l1 - 1] for row i < l2, column
// j < l1. Evaluated as a carry-less convolution, so large keys hash in
// O(l1 l2 / 64^2) word multiplies.
std::vector<std::uint8_t> toeplitz_hash(std::span<const std::uint8_t> bits,
                                        std::span<const std::uint8_t> diagonal_bits,
                                        std::size_t out_len);

}  // namespace lcqkd
