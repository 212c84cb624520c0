#pragma once

#include <complex>

#include "lcqkd/channels.hpp"
#include "lcqkd/rng.hpp"
#include "lcqkd/signal.hpp"

namespace lcqkd {

enum class Outcome : int { bit0 = 0, bit1 = 1, inconclusive = 2 };

// Distribution of the measured q quadrature for a Gaussian signal: normal
// with mean Re(center) and variance 1/4 + p_var/2 (1/4 is the shot noise of
// a coherent state in these units).
struct QDistribution {
    double mean;
    double variance;
};

// Conditional outcome probabilities p(b|a) for bit values encoded as +-gamma.
// By symmetry p11 = p00 and p01 = p10; p_ok is the conclusive probability,
// identical for both sent bits.
struct OutcomeProbs {
    double p00;
    double p10;
    double p01;
    double p11;
    double p_ok;
};

// One simulated detection round.
struct RoundSample {
    double q;
    Outcome outcome;
    std::complex<double> eve_amplitude;  // amplitude diverted into the tap
    bool error;                          // conclusive and decoded != sent
};

QDistribution q_distribution(const GaussianSignal& sig);

// Threshold rule: q >= theta is bit 0, q <= -theta is bit 1, the band between
// is inconclusive. Boundary values count as conclusive.
Outcome classify(double q, double threshold);

// Analytic outcome probabilities for amplitude gamma sent through the reduced
// line: pair before the tap, loss (1 - r_e) at the tap, pair after it.
OutcomeProbs outcome_probs(double gamma, const ChannelPair& before_eve,
                           const ChannelPair& after_eve, double r_e,
                           double threshold);

// Samples one round by the generative model: draw the field amplitude after
// the first segment, split off the tap, propagate the kept part, then draw
// the homodyne result about its real part.
RoundSample sample_outcome(int alice_bit, double gamma, const ChannelPair& before_eve,
                           const ChannelPair& after_eve, double r_e, double threshold,
                           RandomStream& rng);

}  // namespace lcqkd
