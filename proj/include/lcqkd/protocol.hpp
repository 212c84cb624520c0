#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lcqkd/channels.hpp"
#include "lcqkd/detection.hpp"
#include "lcqkd/postprocess.hpp"
#include "lcqkd/security.hpp"

namespace lcqkd {

struct SimConfig {
    LineGeometry line{100.0, 50.0};
    double gamma = 100.0;
    double theta = 30.0;
    bool auto_optimize = false;  // pick gamma and theta by optimize_key_fraction
    std::uint64_t rounds = 1'000'000;
    std::uint64_t seed = 42;
    std::uint64_t batch = 10'000;   // rounds held in memory at once
    std::size_t chunk = 1'000;      // reconciliation block length
    std::size_t disclose = 1'000;   // sacrificed error-estimate bits
};

// One protocol round; a pure function of (seed, index).
struct RoundRecord {
    std::uint64_t index = 0;
    int alice_bit = 0;
    std::complex<double> eve_amplitude;
    double q = 0.0;
    Outcome outcome = Outcome::inconclusive;
    bool error = false;
};

RoundRecord run_round(const SimConfig& config, std::uint64_t index);

struct SessionResult {
    SimConfig config;
    double gamma = 0.0;  // values actually used (after optional optimization)
    double theta = 0.0;

    std::uint64_t n_alice0 = 0;  // rounds where Alice sent 0 / 1
    std::uint64_t n_alice1 = 0;
    std::uint64_t n00 = 0;  // conclusive counts; n_ba = Bob decoded b, Alice sent a
    std::uint64_t n10 = 0;
    std::uint64_t n01 = 0;
    std::uint64_t n11 = 0;
    std::uint64_t sifted_len = 0;
    std::uint64_t error_count = 0;

    BerEstimate disclosure;
    std::size_t disclosed_bits = 0;
    std::size_t syndrome_bits = 0;
    std::size_t chunks_total = 0;
    std::size_t chunks_failed = 0;
    std::size_t dropped_tail_bits = 0;
    std::size_t reconciled_len = 0;
    std::size_t leaked_bits = 0;    // disclosed + syndrome
    std::size_t removed_bits = 0;   // privacy amplification shrink e
    std::size_t final_len = 0;

    std::vector<std::uint8_t> key_a;        // Alice's final key
    std::vector<std::uint8_t> key_b_final;  // Bob's final key
    bool keys_match = false;

    OutcomeProbs analytic_p{};  // at the used working point
    KeyRateReport analytic_rate{};
    double analytic_ber = 0.0;         // error probability among conclusive
    double empirical_fraction = 0.0;   // final_len / rounds
};

// Full session: rounds, sifting, sample disclosure, chunked reconciliation,
// privacy amplification sized by the analytic bound plus everything leaked.
// Throws std::runtime_error if more than 10% of chunks fail to decode.
SessionResult run_session(const SimConfig& config);

struct ComparisonRow {
    std::string quantity;
    double analytic = 0.0;
    double empirical = 0.0;
    double std_error = 0.0;
    double z = 0.0;
};

// Z-scores of the session tallies against the analytic model: p00, p10,
// p_ok, the sifted error rate, and the final fraction (the last conditioned
// on the realized reconciliation leakage, which is not modelled
// analytically). Throws std::domain_error on a session with no conclusive
// rounds.
std::vector<ComparisonRow> empirical_vs_analytic(const SessionResult& result);

// Line-oriented snapshot, `name value` per line: config header, tallies,
// and FNV-1a hashes of the final keys. Identical configs produce identical
// snapshots.
void write_snapshot(std::ostream& out, const SessionResult& result);

}  // namespace lcqkd
