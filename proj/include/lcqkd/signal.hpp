#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "lcqkd/channels.hpp"
#include "lcqkd/rng.hpp"

namespace lcqkd {

// Gaussian phase-space description of the field state: a coherent-state
// mixture centred on `center` whose P-function is an isotropic complex
// Gaussian with total variance `p_var` (each quadrature carries p_var / 2).
// A pure coherent state has p_var = 0.
struct GaussianSignal {
    std::complex<double> center{0.0, 0.0};
    double p_var = 0.0;
};

// Both output ports of a beamsplitter tap.
struct SplitAmplitudes {
    std::complex<double> kept;
    std::complex<double> tapped;
};

// Coherent input through a loss-then-amplifier pair: the centre scales by
// sqrt(GT) and the amplifier adds G - 1 of P-function variance.
GaussianSignal propagate(std::complex<double> amplitude, const ChannelPair& pair);

// General signal through a pair: existing P-variance is scaled by GT and the
// amplifier noise is added on top.
GaussianSignal propagate(const GaussianSignal& sig, const ChannelPair& pair);

// Pure loss on a signal: centre scales by sqrt(T), P-variance by T.
GaussianSignal apply_loss(const GaussianSignal& sig, double transmission);

// Mean photon number |center|^2 + p_var.
double photon_mean(const GaussianSignal& sig);

// Exact photon-number variance of the displaced thermal state the signal
// describes: |c|^2 (1 + 2 v) + v (1 + v) with v = p_var.
double photon_variance(const GaussianSignal& sig);

// Photon-number variance after a transparent chain (G = 1/T per stage) given
// the input mean photon number. Grows linearly with the stage count.
double chain_photon_variance(double mean_photons, double stage_transmission,
                             std::size_t stages);

// Photon-number distribution implied by the Gaussian description, evaluated
// for counts 0..cutoff inclusive.
std::vector<double> photon_number_pmf(const GaussianSignal& sig, std::size_t cutoff);

// Draw a coherent amplitude from the P-function.
std::complex<double> sample_alpha(const GaussianSignal& sig, RandomStream& rng);

// Beamsplitter with reflectivity r in [0, 1]: kept amplitude sqrt(1-r) a,
// tapped amplitude sqrt(r) a. |kept|^2 + |tapped|^2 = |a|^2.
SplitAmplitudes beamsplit(std::complex<double> amplitude, double reflectivity);

}  // namespace lcqkd
