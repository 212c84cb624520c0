#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lcqkd/ldpc.hpp"
#include "lcqkd/rng.hpp"
#include "lcqkd/toeplitz.hpp"

namespace lcqkd {

// Conclusive-round data kept for reconciliation: hard bits plus the raw
// quadrature values they were decided from.
struct SiftedKey {
    std::vector<std::uint8_t> bits;
    std::vector<double> q_values;
};

// Posterior probability that a conclusive decision is wrong given the
// measured quadrature. mean_q and var_q describe the q distribution of the
// bit-0 signal (mean_q > 0); the result depends on |q| only.
double bit_error_prob_from_q(double q, double mean_q, double var_q);

struct BerEstimate {
    double estimate = 0.0;
    double lower95 = 0.0;
    double upper95 = 0.0;
    std::size_t sample_size = 0;
    std::size_t mismatches = 0;
};

// Compare a random sample of positions over the public channel. The sampled
// positions are removed from both keys; the 95% interval is the central
// Beta(1+k, 1+n-k) posterior interval.
BerEstimate estimate_ber_disclosure(SiftedKey& alice, SiftedKey& bob,
                                    std::size_t sample_size, RandomStream& rng);

// Probability that the parities of a `block_size` block differ when each bit
// flips independently with probability ber.
double parity_mismatch_rate(double ber, std::size_t block_size);

struct ParityInversion {
    double ber = 0.0;
    bool saturated = false;  // mismatch >= 1/2 carries no rate information
};

// Inverts parity_mismatch_rate.
ParityInversion invert_parity_mismatch(double mismatch, std::size_t block_size);

// Blockwise parity comparison of two keys: the observed mismatch rate and
// the BER inferred from it. Leaks one parity bit per block.
struct ParityEstimate {
    double mismatch_rate = 0.0;
    ParityInversion inferred;
    std::size_t blocks = 0;
    std::size_t parity_bits = 0;
};

ParityEstimate estimate_ber_parity(std::span<const std::uint8_t> key_a,
                                   std::span<const std::uint8_t> key_b,
                                   std::size_t block_size);

// Code family for adaptive reconciliation: one block length, several
// syndrome lengths. design_ber is the largest error rate a variant is meant
// to correct reliably at this block length.
struct CodeFamily {
    struct Entry {
        double rate;
        double design_ber;
        SyndromeCode code;
    };
    std::size_t block = 0;
    std::vector<Entry> entries;  // ascending rate

    // Regular degree-3 codes at rates {0.3, 0.5, 0.6, 0.7, 0.8}, built from
    // fixed public seeds and cached per block length. The rate-0.3 variant
    // is the high-error-rate bootstrap used before any estimate exists.
    static const CodeFamily& standard(std::size_t block);
};

struct ChunkReport {
    std::size_t index = 0;
    double rate = 0.0;  // rate of the last code tried
    std::size_t syndrome_bits = 0;
    bool success = false;
    unsigned iterations = 0;
    std::size_t errors_corrected = 0;
};

struct CorrectionResult {
    std::vector<std::uint8_t> alice_bits;  // reconciled chunks, in order
    std::vector<std::uint8_t> bob_bits;
    std::size_t syndrome_bits = 0;  // total leaked, failed attempts included
    std::size_t chunks_total = 0;
    std::size_t chunks_failed = 0;
    std::size_t dropped_tail_bits = 0;  // remainder shorter than one block
    double ber_estimate = 0.0;          // running estimate after all chunks
    std::vector<ChunkReport> chunks;
};

// Chunked syndrome reconciliation with rate adaptation. The first chunk uses
// the lowest-rate (highest design BER) code; afterwards the code is the
// highest rate whose design BER covers the running error estimate inflated
// by its uncertainty. A failed chunk retries at the next lower rate; if the
// lowest rate fails too, the chunk is dropped from both keys. Every sent
// syndrome counts toward the leakage.
CorrectionResult adaptive_correct(std::span<const std::uint8_t> alice,
                                  std::span<const std::uint8_t> bob,
                                  std::span<const double> bob_error_probs,
                                  const CodeFamily& family,
                                  std::optional<BerEstimate> prior = {});

// Shrinks a reconciled key by remove_bits with a Toeplitz hash whose
// diagonal is drawn from rng. Both parties must use the same stream.
std::vector<std::uint8_t> privacy_amplify(std::span<const std::uint8_t> key,
                                          std::size_t remove_bits, RandomStream& rng);

}  // namespace lcqkd
