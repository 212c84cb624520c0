#include "lcqkd/protocol.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace lcqkd {
namespace {

struct ResolvedPoint {
    LinkModel link;
    double gamma;
    double theta;
};

ResolvedPoint resolve_point(const SimConfig& config) {
    ResolvedPoint pt;
    pt.link = link_model(config.line);
    if (config.auto_optimize) {
        const SecurityReport rep = optimize_key_fraction(pt.link);
        pt.gamma = rep.gamma_opt;
        pt.theta = rep.theta_opt;
    } else {
        pt.gamma = config.gamma;
        pt.theta = config.theta;
    }
    if (!(pt.gamma >= 0.0) || !(pt.theta >= 0.0))
        throw std::invalid_argument("gamma and theta must be nonnegative");
    return pt;
}

RoundRecord sample_round(const ResolvedPoint& pt, std::uint64_t seed, std::uint64_t index) {
    RandomStream rng(seed, RandomStream::kRounds, index);
    RoundRecord rec;
    rec.index = index;
    rec.alice_bit = rng.next_bit() ? 1 : 0;
    const RoundSample s = sample_outcome(rec.alice_bit, pt.gamma, pt.link.before_eve,
                                         pt.link.after_eve, pt.link.r_e, pt.theta, rng);
    rec.eve_amplitude = s.eve_amplitude;
    rec.q = s.q;
    rec.outcome = s.outcome;
    rec.error = s.error;
    return rec;
}

std::uint64_t fnv1a_bits(const std::vector<std::uint8_t>& bits) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&](std::uint8_t byte) {
        h ^= byte;
        h *= 0x100000001b3ull;
    };
    std::uint8_t acc = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        acc |= static_cast<std::uint8_t>((bits[i] & 1u) << (i % 8));
        if (i % 8 == 7) {
            mix(acc);
            acc = 0;
        }
    }
    if (bits.size() % 8 != 0) mix(acc);
    mix(static_cast<std::uint8_t>(bits.size() & 0xff));
    return h;
}

}  // namespace

RoundRecord run_round(const SimConfig& config, std::uint64_t index) {
    if (config.rounds < 1) throw std::invalid_argument("round count must be >= 1");
    return sample_round(resolve_point(config), config.seed, index);
}

SessionResult run_session(const SimConfig& config) {
    if (config.rounds < 1) throw std::invalid_argument("round count must be >= 1");
    if (config.batch < 1) throw std::invalid_argument("batch size must be >= 1");
    if (config.chunk < 2) throw std::invalid_argument("chunk length must be >= 2");

    const ResolvedPoint pt = resolve_point(config);

    SessionResult res;
    res.config = config;
    res.gamma = pt.gamma;
    res.theta = pt.theta;
    res.analytic_p = outcome_probs(pt.gamma, pt.link.before_eve, pt.link.after_eve,
                                   pt.link.r_e, pt.theta);
    res.analytic_rate = key_fraction(pt.gamma, pt.link, pt.theta);
    res.analytic_ber =
        res.analytic_p.p_ok > 0.0 ? res.analytic_p.p10 / res.analytic_p.p_ok : 0.0;

    SiftedKey alice, bob;
    for (std::uint64_t start = 0; start < config.rounds; start += config.batch) {
        const std::uint64_t stop = std::min(config.rounds, start + config.batch);
        for (std::uint64_t i = start; i < stop; ++i) {
            const RoundRecord rec = sample_round(pt, config.seed, i);
            (rec.alice_bit ? res.n_alice1 : res.n_alice0) += 1;
            if (rec.outcome == Outcome::inconclusive) continue;
            const int bob_bit = rec.outcome == Outcome::bit1 ? 1 : 0;
            if (rec.alice_bit == 0)
                (bob_bit ? res.n10 : res.n00) += 1;
            else
                (bob_bit ? res.n11 : res.n01) += 1;
            res.error_count += rec.error ? 1 : 0;
            alice.bits.push_back(static_cast<std::uint8_t>(rec.alice_bit));
            bob.bits.push_back(static_cast<std::uint8_t>(bob_bit));
            bob.q_values.push_back(rec.q);
        }
    }
    res.sifted_len = alice.bits.size();

    // Error-rate estimate on a sacrificed sample; positions leave both keys.
    std::optional<BerEstimate> prior;
    const std::size_t sample =
        std::min<std::size_t>(config.disclose, res.sifted_len / 2);
    if (sample > 0) {
        RandomStream rng(config.seed, RandomStream::kDisclosure, 0);
        res.disclosure = estimate_ber_disclosure(alice, bob, sample, rng);
        res.disclosed_bits = sample;
        prior = res.disclosure;
    }

    // Soft error probabilities for the decoder, from the analytic q
    // distribution of the arriving signal.
    GaussianSignal arriving = propagate(pt.gamma, pt.link.before_eve);
    arriving = apply_loss(arriving, 1.0 - pt.link.r_e);
    arriving = propagate(arriving, pt.link.after_eve);
    const QDistribution qd = q_distribution(arriving);
    std::vector<double> error_probs(bob.bits.size());
    for (std::size_t i = 0; i < bob.bits.size(); ++i)
        error_probs[i] = bit_error_prob_from_q(bob.q_values[i], qd.mean, qd.variance);

    CorrectionResult corr;
    if (!alice.bits.empty()) {
        corr = adaptive_correct(alice.bits, bob.bits, error_probs,
                                CodeFamily::standard(config.chunk), prior);
        if (corr.chunks_failed * 10 > corr.chunks_total)
            throw std::runtime_error(
                "reconciliation failed on " + std::to_string(corr.chunks_failed) + " of " +
                std::to_string(corr.chunks_total) + " chunks");
    }
    res.syndrome_bits = corr.syndrome_bits;
    res.chunks_total = corr.chunks_total;
    res.chunks_failed = corr.chunks_failed;
    res.dropped_tail_bits = corr.dropped_tail_bits;
    res.reconciled_len = corr.alice_bits.size();
    res.leaked_bits = res.disclosed_bits + res.syndrome_bits;

    // Privacy amplification removes the bound on Eve's conclusive-round
    // information plus every bit leaked during reconciliation.
    const double eve_bits =
        res.analytic_rate.eve_bound * static_cast<double>(res.sifted_len);
    res.removed_bits = static_cast<std::size_t>(
        std::ceil(eve_bits + static_cast<double>(res.leaked_bits)));
    {
        RandomStream rng_a(config.seed, RandomStream::kHashing, 0);
        res.key_a = privacy_amplify(corr.alice_bits, res.removed_bits, rng_a);
        RandomStream rng_b(config.seed, RandomStream::kHashing, 0);
        res.key_b_final = privacy_amplify(corr.bob_bits, res.removed_bits, rng_b);
    }
    res.final_len = res.key_a.size();
    res.keys_match = res.key_a == res.key_b_final;
    res.empirical_fraction =
        static_cast<double>(res.final_len) / static_cast<double>(config.rounds);
    return res;
}

std::vector<ComparisonRow> empirical_vs_analytic(const SessionResult& result) {
    if (result.config.rounds == 0 || result.sifted_len == 0)
        throw std::domain_error("session has no conclusive rounds to compare");

    const double rounds = static_cast<double>(result.config.rounds);
    auto binom_row = [](std::string name, double analytic, double count,
                        double trials) {
        ComparisonRow row;
        row.quantity = std::move(name);
        row.analytic = analytic;
        row.empirical = trials > 0.0 ? count / trials : 0.0;
        row.std_error =
            trials > 0.0 ? std::sqrt(std::max(analytic * (1.0 - analytic), 0.0) / trials)
                         : 0.0;
        const double diff = row.empirical - row.analytic;
        row.z = row.std_error > 0.0
                    ? diff / row.std_error
                    : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
        return row;
    };

    std::vector<ComparisonRow> rows;
    const double n0 = static_cast<double>(result.n_alice0);
    rows.push_back(binom_row("p00", result.analytic_p.p00,
                             static_cast<double>(result.n00), n0));
    rows.push_back(binom_row("p10", result.analytic_p.p10,
                             static_cast<double>(result.n10), n0));
    rows.push_back(binom_row("p_ok", result.analytic_p.p_ok,
                             static_cast<double>(result.sifted_len), rounds));
    rows.push_back(binom_row("sifted_ber", result.analytic_ber,
                             static_cast<double>(result.error_count),
                             static_cast<double>(result.sifted_len)));

    // The final fraction is predicted from the analytic conclusive rate and
    // Eve bound, conditioned on the realized reconciliation leakage; the
    // remaining randomness is the conclusive count itself.
    {
        ComparisonRow row;
        row.quantity = "final_fraction";
        const double eve = result.analytic_rate.eve_bound;
        const double predicted_final =
            result.analytic_p.p_ok * rounds * (1.0 - eve) -
            static_cast<double>(2 * result.disclosed_bits + result.syndrome_bits +
                                result.dropped_tail_bits);
        row.analytic = std::max(predicted_final, 0.0) / rounds;
        row.empirical = result.empirical_fraction;
        row.std_error = (1.0 - eve) *
                        std::sqrt(result.analytic_p.p_ok *
                                  (1.0 - result.analytic_p.p_ok) / rounds);
        const double diff = row.empirical - row.analytic;
        row.z = row.std_error > 0.0
                    ? diff / row.std_error
                    : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
        rows.push_back(row);
    }
    return rows;
}

void write_snapshot(std::ostream& out, const SessionResult& result) {
    const auto& c = result.config;
    out.precision(17);
    out << "lcqkd-session 1\n";
    out << "dist_ab " << c.line.dist_ab << "\n";
    out << "dist_ae " << c.line.dist_ae << "\n";
    out << "spacing " << c.line.spacing << "\n";
    out << "attenuation " << c.line.attenuation << "\n";
    out << "r_e " << c.line.r_e << "\n";
    out << "gamma " << result.gamma << "\n";
    out << "theta " << result.theta << "\n";
    out << "rounds " << c.rounds << "\n";
    out << "seed " << c.seed << "\n";
    out << "chunk " << c.chunk << "\n";
    out << "disclose " << c.disclose << "\n";
    out << "n_alice0 " << result.n_alice0 << "\n";
    out << "n_alice1 " << result.n_alice1 << "\n";
    out << "n00 " << result.n00 << "\n";
    out << "n10 " << result.n10 << "\n";
    out << "n01 " << result.n01 << "\n";
    out << "n11 " << result.n11 << "\n";
    out << "sifted_len " << result.sifted_len << "\n";
    out << "error_count " << result.error_count << "\n";
    out << "disclosed_bits " << result.disclosed_bits << "\n";
    out << "syndrome_bits " << result.syndrome_bits << "\n";
    out << "chunks_total " << result.chunks_total << "\n";
    out << "chunks_failed " << result.chunks_failed << "\n";
    out << "dropped_tail_bits " << result.dropped_tail_bits << "\n";
    out << "reconciled_len " << result.reconciled_len << "\n";
    out << "removed_bits " << result.removed_bits << "\n";
    out << "final_len " << result.final_len << "\n";
    out << "keys_match " << (result.keys_match ? 1 : 0) << "\n";
    out << "key_a_fnv " << fnv1a_bits(result.key_a) << "\n";
    out << "key_b_fnv " << fnv1a_bits(result.key_b_final) << "\n";
}

}  // namespace lcqkd
