#pragma once

#include <cstddef>

#include "lcqkd/rng.hpp"

namespace lcqkd {

// Bright classical probe used to audit the line loss between key rounds.
struct TestPulseSpec {
    double power_watts;
    double duration_s;
    double frequency_hz;  // optical carrier frequency
};

// Outcome of one simulated loss probe.
struct ProbeResult {
    double r_t_estimate;  // inferred total local loss fraction
    bool flagged;         // estimate exceeds the intrinsic baseline by 3 sigma
};

// Splits the measured total local loss r_t into the known intrinsic part r_0
// and the unexplained remainder: (1 - r_t) = (1 - r_e)(1 - r_0).
double infer_r_e(double r_0, double r_t);

// Photon number of a probe pulse, energy / (h nu).
double test_pulse_photons(const TestPulseSpec& spec);

// Smallest loss fraction resolvable by one probe through a transparent
// chain: the relative photon-number spread sqrt(Var n) / n at the receiver.
double min_detectable_leakage(double test_photons, double stage_transmission,
                              std::size_t stages);

// Draws one probe measurement from the chain statistics (normal approximation
// with the exact chain variance) and applies the 3 sigma detection rule
// against the intrinsic baseline r_0.
ProbeResult simulate_loss_probe(double true_r_t, double r_0, double test_photons,
                                double stage_transmission, std::size_t stages,
                                RandomStream& rng);

}  // namespace lcqkd
