#pragma once

#include <optional>

#include "lcqkd/channels.hpp"
#include "lcqkd/detection.hpp"

namespace lcqkd {

// Reduced description of the line as the security analysis sees it: the two
// transparent segments around the tap and the tap reflectivity.
struct LinkModel {
    ChannelPair before_eve;
    ChannelPair after_eve;
    double r_e = 0.0;
};

LinkModel link_model(const LineGeometry& line);

// Shannon entropy of a bit, in bits. h(0) = h(1) = 0.
double binary_entropy(double p);

// Mean of exp(-2 r_e |alpha|^2) over the field amplitude at the tap,
// conditioned on a conclusive outcome at the detector. This is the mean
// overlap of the two tap states an eavesdropper must distinguish; 1 means
// no information leaks.
double eve_exp_term(double gamma, const LinkModel& link, double threshold);

// Upper bound on the leaked information per conclusive bit, from the mean
// overlap via concavity of the entropy.
double eve_info_bound(double gamma, const LinkModel& link, double threshold);

// Receiver's conditional entropy H(A|B) per conclusive bit.
double bob_cond_entropy(const OutcomeProbs& probs);

struct KeyRateReport {
    double p_ok = 0.0;
    double eve_bound = 0.0;
    double bob_entropy = 0.0;
    double raw_fraction = 0.0;          // may be negative
    double fraction = 0.0;              // clamped at zero
    bool conclusive_underflow = false;  // p_ok below 1e-300, rate forced to 0
};

// Final key fraction per emitted bit: p_ok (1 - eve_bound - bob_entropy).
KeyRateReport key_fraction(double gamma, const LinkModel& link, double threshold);

struct SecurityReport : KeyRateReport {
    double gamma_opt = 0.0;
    double theta_opt = 0.0;
};

// Maximizes the key fraction over signal amplitude and threshold. Coarse
// log-spaced grid over gamma in [1, 1e5] and theta in [0, 10 gamma] followed
// by local refinement. Deterministic; ties resolve to the smallest
// (gamma, theta). Fixing an argument restricts the search to the other.
SecurityReport optimize_key_fraction(const LinkModel& link,
                                     std::optional<double> fixed_gamma = {},
                                     std::optional<double> fixed_theta = {});

}  // namespace lcqkd
