#pragma once

#include <cstddef>

namespace lcqkd {

// Pure attenuation, transmission T in (0, 1].
struct LossChannel {
    double transmission;
};

// Phase-insensitive linear amplifier, gain G >= 1.
struct AmpChannel {
    double gain;
};

// Equivalent loss-then-amplifier pair. Any alternating chain of losses and
// amplifiers reduces to this normal form.
struct ChannelPair {
    double transmission = 1.0;
    double gain = 1.0;
};

// The same pair in natural logs, for chains whose parameters leave the
// representable double range (the gain grows like (GT)^M when GT > 1).
struct LogChannelPair {
    double log_transmission = 0.0;
    double log_gain = 0.0;
};

// Physical layout of the line. Distances in km. A stage is one fibre span of
// `spacing` km followed by an amplifier that exactly compensates the span
// loss. Eve's tap sits between the two stage blocks.
struct LineGeometry {
    double dist_ab;                    // Alice to Bob
    double dist_ae;                    // Alice to Eve's tap
    double spacing = 50.0;             // span length d
    double attenuation = 1.0 / 50.0;   // fibre attenuation, km^-1: T = 10^(-attenuation*d)
    double r_e = 0.0;                  // tap reflectivity in [0, 1)
};

// Reduced channel description of the two line segments around the tap.
struct SegmentParams {
    ChannelPair before_eve;
    ChannelPair after_eve;
    std::size_t stages_before = 0;
    std::size_t stages_after = 0;
    double stage_transmission = 1.0;
};

// Sequential losses multiply.
double compose_losses(double t1, double t2);

// Sequential amplifier gains multiply.
double compose_amps(double g1, double g2);

// Rewrites amplifier-then-loss as an equivalent loss-then-amplifier pair.
// The product gain*transmission is preserved exactly.
ChannelPair swap_amp_loss(double gain_before, double transmission_after);

// Reduces M repetitions of (loss T, amplifier G) to one equivalent pair.
// Computed in log space; stable for any M even when (GT)^M over/underflows.
LogChannelPair reduce_chain_log(double gain, double transmission, std::size_t stages);

// Same, exponentiated. Outside double range the fields saturate to 0 or inf;
// use reduce_chain_log when |M log(GT)| can exceed ~700.
ChannelPair reduce_chain(double gain, double transmission, std::size_t stages);

// Chain reduction for the transparent case G = 1/T, where every stage
// restores the mean amplitude. The result satisfies T*G = 1 exactly.
ChannelPair reduce_chain_preserving(double transmission, std::size_t stages);

// Splits the line at the tap and reduces both sides with transparent stages.
// Distances must be integer multiples of the spacing.
SegmentParams segment_params(const LineGeometry& line);

}  // namespace lcqkd
