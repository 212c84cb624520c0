#include "lcqkd/toeplitz.hpp"

#include <bit>
#include <stdexcept>

#if defined(__PCLMUL__)
#include <wmmintrin.h>
#endif

namespace lcqkd {

namespace {

struct U128 {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
};

U128 clmul_soft(std::uint64_t a, std::uint64_t b) {
    U128 r;
    while (b) {
        const int k = std::countr_zero(b);
        b &= b - 1;
        r.lo ^= a << k;
        if (k) r.hi ^= a >> (64 - k);
    }
    return r;
}

#if defined(__PCLMUL__)
U128 clmul_hw(std::uint64_t a, std::uint64_t b) {
    const __m128i p = _mm_clmulepi64_si128(_mm_set_epi64x(0, static_cast<long long>(a)),
                                           _mm_set_epi64x(0, static_cast<long long>(b)), 0x00);
    alignas(16) std::uint64_t words[2];
    _mm_storeu_si128(reinterpret_cast<__m128i*>(words), p);
    return {words[0], words[1]};
}
#endif

bool use_hw_clmul() {
#if defined(__PCLMUL__)
    static const bool ok = __builtin_cpu_supports("pclmul");
    return ok;
#else
    return false;
#endif
}

std::vector<std::uint64_t> pack_bits(std::span<const std::uint8_t> bits) {
    std::vector<std::uint64_t> words((bits.size() + 63) / 64, 0);
    for (std::size_t k = 0; k < bits.size(); ++k)
        if (bits[k] & 1u) words[k >> 6] |= std::uint64_t{1} << (k & 63);
    return words;
}

}  // namespace

std::vector<std::uint8_t> toeplitz_hash(std::span<const std::uint8_t> bits,
                                        std::span<const std::uint8_t> diagonal_bits,
                                        std::size_t out_len) {
    const std::size_t l1 = bits.size();
    if (out_len == 0) return {};
    if (l1 == 0) throw std::domain_error("toeplitz_hash input must be non-empty");
    if (diagonal_bits.size() != l1 + out_len - 1)
        throw std::domain_error("diagonal length must be input + output - 1");

    // out[i] = sum_j diag[i - j + l1 - 1] v[j], i.e. bits [l1-1, l1-1+l2) of
    // the GF(2) convolution diag * v.
    const std::vector<std::uint64_t> v = pack_bits(bits);
    const std::vector<std::uint64_t> d = pack_bits(diagonal_bits);
    std::vector<std::uint64_t> conv(v.size() + d.size() + 1, 0);

    // Only convolution words covering the output band matter.
    const std::size_t first_word = (l1 - 1) >> 6;
    const std::size_t last_word = (l1 - 1 + out_len - 1) >> 6;
    const bool hw = use_hw_clmul();
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i > last_word) break;
        const std::size_t j_lo = (first_word > i + 1) ? first_word - i - 1 : 0;
        if (j_lo >= v.size()) continue;
        const std::size_t j_hi = std::min(v.size() - 1, last_word - i);
        for (std::size_t j = j_lo; j <= j_hi; ++j) {
            U128 p;
#if defined(__PCLMUL__)
            if (hw)
                p = clmul_hw(d[i], v[j]);
            else
                p = clmul_soft(d[i], v[j]);
#else
            p = clmul_soft(d[i], v[j]);
#endif
            conv[i + j] ^= p.lo;
            conv[i + j + 1] ^= p.hi;
        }
    }

    std::vector<std::uint8_t> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) {
        const std::size_t k = l1 - 1 + i;
        out[i] = static_cast<std::uint8_t>((conv[k >> 6] >> (k & 63)) & 1u);
    }
    return out;
}

}  // namespace lcqkd
