#include "lcqkd/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/beta.hpp>

namespace lcqkd {

double bit_error_prob_from_q(double q, double mean_q, double var_q) {
    if (!(mean_q > 0.0) || !(var_q > 0.0))
        throw std::domain_error("q distribution needs positive mean and variance");
    // Likelihood ratio of the two signs is exp(2 mean |q| / var); overflow
    // saturates cleanly to probability 0.
    return 1.0 / (1.0 + std::exp(2.0 * mean_q * std::abs(q) / var_q));
}

BerEstimate estimate_ber_disclosure(SiftedKey& alice, SiftedKey& bob,
                                    std::size_t sample_size, RandomStream& rng) {
    const std::size_t n = alice.bits.size();
    if (bob.bits.size() != n)
        throw std::domain_error("keys must have equal length");
    if (sample_size == 0 || sample_size > n)
        throw std::domain_error("sample size must lie in [1, key length]");

    // Partial Fisher-Yates gives a uniform sample without replacement.
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    for (std::size_t k = 0; k < sample_size; ++k) {
        const std::size_t j = k + static_cast<std::size_t>(rng.next_u64() % (n - k));
        std::swap(idx[k], idx[j]);
    }

    BerEstimate est;
    est.sample_size = sample_size;
    std::vector<std::uint8_t> consumed(n, 0);
    for (std::size_t k = 0; k < sample_size; ++k) {
        const std::uint32_t i = idx[k];
        consumed[i] = 1;
        if (alice.bits[i] != bob.bits[i]) est.mismatches += 1;
    }
    est.estimate = static_cast<double>(est.mismatches) / static_cast<double>(sample_size);

    const boost::math::beta_distribution<double> post(
        1.0 + static_cast<double>(est.mismatches),
        1.0 + static_cast<double>(sample_size - est.mismatches));
    est.lower95 = boost::math::quantile(post, 0.025);
    est.upper95 = boost::math::quantile(post, 0.975);

    // Disclosed positions are gone from both keys.
    auto compact = [&](SiftedKey& key) {
        std::size_t w = 0;
        const bool with_q = key.q_values.size() == n;
        for (std::size_t i = 0; i < n; ++i) {
            if (consumed[i]) continue;
            key.bits[w] = key.bits[i];
            if (with_q) key.q_values[w] = key.q_values[i];
            ++w;
        }
        key.bits.resize(w);
        if (with_q) key.q_values.resize(w);
    };
    compact(alice);
    compact(bob);
    return est;
}

double parity_mismatch_rate(double ber, std::size_t block_size) {
    if (ber < 0.0 || ber > 1.0)
        throw std::domain_error("bit error rate must lie in [0, 1]");
    if (block_size == 0) throw std::domain_error("block size must be >= 1");
    return (1.0 - std::pow(1.0 - 2.0 * ber, static_cast<double>(block_size))) / 2.0;
}

ParityInversion invert_parity_mismatch(double mismatch, std::size_t block_size) {
    if (mismatch < 0.0 || mismatch > 1.0)
        throw std::domain_error("mismatch rate must lie in [0, 1]");
    if (block_size == 0) throw std::domain_error("block size must be >= 1");
    if (mismatch >= 0.5) return {0.5, true};
    const double root =
        std::pow(1.0 - 2.0 * mismatch, 1.0 / static_cast<double>(block_size));
    return {(1.0 - root) / 2.0, false};
}

ParityEstimate estimate_ber_parity(std::span<const std::uint8_t> key_a,
                                   std::span<const std::uint8_t> key_b,
                                   std::size_t block_size) {
    if (key_a.size() != key_b.size())
        throw std::domain_error("keys must have equal length");
    if (block_size == 0) throw std::domain_error("block size must be >= 1");
    const std::size_t blocks = key_a.size() / block_size;
    if (blocks == 0) throw std::domain_error("keys shorter than one block");

    std::size_t mismatched = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
        std::uint8_t pa = 0, pb = 0;
        for (std::size_t i = b * block_size; i < (b + 1) * block_size; ++i) {
            pa ^= key_a[i] & 1u;
            pb ^= key_b[i] & 1u;
        }
        if (pa != pb) mismatched += 1;
    }

    ParityEstimate out;
    out.blocks = blocks;
    out.parity_bits = blocks;
    out.mismatch_rate = static_cast<double>(mismatched) / static_cast<double>(blocks);
    out.inferred = invert_parity_mismatch(out.mismatch_rate, block_size);
    return out;
}

const CodeFamily& CodeFamily::standard(std::size_t block) {
    static std::mutex mu;
    static std::map<std::size_t, CodeFamily> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(block);
    if (it != cache.end()) return it->second;

    // Fixed public construction seeds; design points measured for the
    // degree-3 family at block 1000 and used as-is for nearby lengths.
    struct Variant {
        double rate;
        double design_ber;
        std::uint64_t seed;
    };
    static constexpr Variant kVariants[] = {
        {0.3, 0.100, 100},
        {0.5, 0.060, 101},
        {0.6, 0.040, 102},
        {0.7, 0.020, 103},
        {0.8, 0.010, 104},
    };

    CodeFamily fam;
    fam.block = block;
    for (const Variant& v : kVariants) {
        const std::size_t m = static_cast<std::size_t>(
            std::llround(static_cast<double>(block) * (1.0 - v.rate)));
        fam.entries.push_back(
            {v.rate, v.design_ber, SyndromeCode::make_regular(block, m, 3, v.seed)});
    }
    return cache.emplace(block, std::move(fam)).first->second;
}

namespace {

double clamp_prob(double p) { return std::clamp(p, 1e-12, 0.5); }

std::vector<double> build_llr(std::span<const std::uint8_t> bob_bits,
                              std::span<const double> error_probs, double fallback_ber) {
    std::vector<double> llr(bob_bits.size());
    for (std::size_t i = 0; i < bob_bits.size(); ++i) {
        const double p =
            clamp_prob(error_probs.empty() ? fallback_ber : error_probs[i]);
        const double mag = std::log((1.0 - p) / p);
        llr[i] = bob_bits[i] ? -mag : mag;
    }
    return llr;
}

}  // namespace

CorrectionResult adaptive_correct(std::span<const std::uint8_t> alice,
                                  std::span<const std::uint8_t> bob,
                                  std::span<const double> bob_error_probs,
                                  const CodeFamily& family,
                                  std::optional<BerEstimate> prior) {
    if (alice.size() != bob.size())
        throw std::domain_error("keys must have equal length");
    if (!bob_error_probs.empty() && bob_error_probs.size() != bob.size())
        throw std::domain_error("error probability vector length mismatch");
    if (family.entries.empty() || family.block == 0)
        throw std::domain_error("empty code family");

    const std::size_t block = family.block;
    CorrectionResult out;
    out.chunks_total = alice.size() / block;
    out.dropped_tail_bits = alice.size() % block;

    std::size_t seen_bits = prior ? prior->sample_size : 0;
    std::size_t seen_errors = prior ? prior->mismatches : 0;

    for (std::size_t k = 0; k < out.chunks_total; ++k) {
        const auto a_chunk = alice.subspan(k * block, block);
        const auto b_chunk = bob.subspan(k * block, block);
        const auto p_chunk = bob_error_probs.empty()
                                 ? std::span<const double>{}
                                 : bob_error_probs.subspan(k * block, block);

        // Rate choice: highest rate whose design BER covers the inflated
        // running estimate; no data yet means the most conservative code.
        std::size_t entry_idx = 0;
        double running = 0.0;
        if (seen_bits > 0) {
            running = static_cast<double>(seen_errors) / static_cast<double>(seen_bits);
            const double se =
                std::sqrt(std::max(running * (1.0 - running), 1e-12) /
                          static_cast<double>(seen_bits));
            const double inflated = running + std::max(2.0 * se, 0.01);
            for (std::size_t e = family.entries.size(); e-- > 0;) {
                if (family.entries[e].design_ber >= inflated) {
                    entry_idx = e;
                    break;
                }
            }
        }

        ChunkReport rep;
        rep.index = k;
        for (std::size_t e = entry_idx + 1; e-- > 0;) {
            const auto& entry = family.entries[e];
            // Channel assumption for hard bits: the running estimate when one
            // exists, otherwise the attempted code's own design point.
            const double fallback =
                seen_bits > 0 ? std::max(running, 1e-4) : entry.design_ber;
            const std::vector<double> llr = build_llr(b_chunk, p_chunk, fallback);
            rep.rate = entry.rate;
            rep.syndrome_bits += entry.code.m;
            const std::vector<std::uint8_t> synd = entry.code.syndrome(a_chunk);
            const DecodeResult dec = bp_decode(entry.code, llr, synd);
            rep.iterations = dec.iterations;
            if (dec.success) {
                rep.success = true;
                for (std::size_t i = 0; i < block; ++i)
                    if (dec.bits[i] != b_chunk[i]) rep.errors_corrected += 1;
                out.alice_bits.insert(out.alice_bits.end(), a_chunk.begin(), a_chunk.end());
                out.bob_bits.insert(out.bob_bits.end(), dec.bits.begin(), dec.bits.end());
                seen_bits += block;
                seen_errors += rep.errors_corrected;
                break;
            }
        }
        if (!rep.success) out.chunks_failed += 1;
        out.syndrome_bits += rep.syndrome_bits;
        out.chunks.push_back(rep);
    }

    out.ber_estimate = seen_bits ? static_cast<double>(seen_errors) /
                                       static_cast<double>(seen_bits)
                                 : 0.0;
    return out;
}

std::vector<std::uint8_t> privacy_amplify(std::span<const std::uint8_t> key,
                                          std::size_t remove_bits, RandomStream& rng) {
    const std::size_t l1 = key.size();
    if (remove_bits >= l1) return {};
    const std::size_t l2 = l1 - remove_bits;
    std::vector<std::uint8_t> diag(l1 + l2 - 1);
    for (auto& b : diag) b = rng.next_bit() ? 1 : 0;
    return toeplitz_hash(key, diag, l2);
}

}  // namespace lcqkd
