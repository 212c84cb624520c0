#include "lcqkd/detection.hpp"

#include <cmath>
#include <stdexcept>

namespace lcqkd {

namespace {

void check_threshold(double threshold) {
    if (threshold < 0.0 || !std::isfinite(threshold))
        throw std::domain_error("threshold must be finite and non-negative");
}

void check_tap(double r_e) {
    if (r_e < 0.0 || r_e >= 1.0)
        throw std::domain_error("tap reflectivity must lie in [0, 1)");
}

// P(X >= t) for X ~ N(mean, var), evaluated with erfc so deep tails keep
// full relative precision instead of cancelling against 1.
double upper_tail(double t, double mean, double var) {
    return 0.5 * std::erfc((t - mean) / std::sqrt(2.0 * var));
}

}  // namespace

QDistribution q_distribution(const GaussianSignal& sig) {
    return {sig.center.real(), 0.25 + sig.p_var / 2.0};
}

Outcome classify(double q, double threshold) {
    check_threshold(threshold);
    if (q >= threshold) return Outcome::bit0;
    if (q <= -threshold) return Outcome::bit1;
    return Outcome::inconclusive;
}

OutcomeProbs outcome_probs(double gamma, const ChannelPair& before_eve,
                           const ChannelPair& after_eve, double r_e,
                           double threshold) {
    check_threshold(threshold);
    check_tap(r_e);
    GaussianSignal sig = propagate(std::complex<double>{gamma, 0.0}, before_eve);
    if (r_e > 0.0) sig = apply_loss(sig, 1.0 - r_e);
    sig = propagate(sig, after_eve);
    const QDistribution qd = q_distribution(sig);

    OutcomeProbs out;
    out.p00 = upper_tail(threshold, qd.mean, qd.variance);
    out.p10 = upper_tail(threshold, -qd.mean, qd.variance);
    out.p01 = out.p10;
    out.p11 = out.p00;
    out.p_ok = out.p00 + out.p10;
    return out;
}

RoundSample sample_outcome(int alice_bit, double gamma, const ChannelPair& before_eve,
                           const ChannelPair& after_eve, double r_e, double threshold,
                           RandomStream& rng) {
    check_threshold(threshold);
    check_tap(r_e);
    if (alice_bit != 0 && alice_bit != 1)
        throw std::domain_error("alice_bit must be 0 or 1");

    const double sent = (alice_bit == 0) ? gamma : -gamma;
    const GaussianSignal at_tap = propagate(std::complex<double>{sent, 0.0}, before_eve);
    const std::complex<double> alpha = sample_alpha(at_tap, rng);
    const SplitAmplitudes split = beamsplit(alpha, r_e);
    const GaussianSignal at_bob = propagate(split.kept, after_eve);
    const std::complex<double> beta = sample_alpha(at_bob, rng);
    // Homodyne on a coherent state: q ~ N(Re beta, 1/4).
    const double q = beta.real() + 0.5 * rng.next_normal();

    RoundSample out;
    out.q = q;
    out.outcome = classify(q, threshold);
    out.eve_amplitude = split.tapped;
    out.error = (out.outcome != Outcome::inconclusive) &&
                (static_cast<int>(out.outcome) != alice_bit);
    return out;
}

}  // namespace lcqkd
