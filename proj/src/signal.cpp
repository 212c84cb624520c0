#include "lcqkd/signal.hpp"

#include <cmath>
#include <stdexcept>

namespace lcqkd {

namespace {

void check_pair(const ChannelPair& pair) {
    if (!(pair.transmission > 0.0) || pair.transmission > 1.0)
        throw std::domain_error("pair transmission must lie in (0, 1]");
    if (!(pair.gain >= 1.0))
        throw std::domain_error("pair gain must be >= 1");
}

}  // namespace

GaussianSignal propagate(std::complex<double> amplitude, const ChannelPair& pair) {
    return propagate(GaussianSignal{amplitude, 0.0}, pair);
}

GaussianSignal propagate(const GaussianSignal& sig, const ChannelPair& pair) {
    check_pair(pair);
    const double gt = pair.gain * pair.transmission;
    return {sig.center * std::sqrt(gt), gt * sig.p_var + (pair.gain - 1.0)};
}

GaussianSignal apply_loss(const GaussianSignal& sig, double transmission) {
    if (!(transmission > 0.0) || transmission > 1.0)
        throw std::domain_error("transmission must lie in (0, 1]");
    return {sig.center * std::sqrt(transmission), transmission * sig.p_var};
}

double photon_mean(const GaussianSignal& sig) {
    return std::norm(sig.center) + sig.p_var;
}

double photon_variance(const GaussianSignal& sig) {
    const double nc = std::norm(sig.center);
    const double v = sig.p_var;
    return nc * (1.0 + 2.0 * v) + v * (1.0 + v);
}

double chain_photon_variance(double mean_photons, double stage_transmission,
                             std::size_t stages) {
    if (mean_photons < 0.0)
        throw std::domain_error("mean photon number must be non-negative");
    if (!(stage_transmission > 0.0) || stage_transmission > 1.0)
        throw std::domain_error("stage transmission must lie in (0, 1]");
    // Added noise photons of the transparent chain: G M (1 - T) with G = 1/T.
    const double added = static_cast<double>(stages) *
                         (1.0 - stage_transmission) / stage_transmission;
    return added * (added + 1.0) + mean_photons * (2.0 * added + 1.0);
}

std::vector<double> photon_number_pmf(const GaussianSignal& sig, std::size_t cutoff) {
    const double mc = std::norm(sig.center);
    const double v = sig.p_var;
    if (v < 0.0) throw std::domain_error("p_var must be non-negative");

    std::vector<double> pmf(cutoff + 1);
    if (v < 1e-12) {
        // Coherent limit: plain Poisson.
        double p = std::exp(-mc);
        for (std::size_t k = 0; k <= cutoff; ++k) {
            pmf[k] = p;
            p *= mc / static_cast<double>(k + 1);
        }
        return pmf;
    }

    // Displaced thermal state. With r = v/(1+v) and x = |c|^2 / (v (1+v)),
    // p(k) = scale * q_k where q_k = r^k L_k(-x) obeys a stable three-term
    // recurrence and stays bounded by (1+v) exp(|c|^2/(1+v)).
    const double r = v / (1.0 + v);
    const double x = mc / (v * (1.0 + v));
    const double scale = std::exp(-mc / (1.0 + v)) / (1.0 + v);

    double q_prev = 1.0;
    double q = r * (1.0 + x);
    pmf[0] = scale;
    if (cutoff >= 1) pmf[1] = scale * q;
    for (std::size_t k = 1; k < cutoff; ++k) {
        const double kk = static_cast<double>(k);
        const double q_next =
            (r * (2.0 * kk + 1.0 + x) * q - r * r * kk * q_prev) / (kk + 1.0);
        q_prev = q;
        q = q_next;
        pmf[k + 1] = scale * q;
    }
    return pmf;
}

std::complex<double> sample_alpha(const GaussianSignal& sig, RandomStream& rng) {
    if (sig.p_var == 0.0) return sig.center;
    return sig.center + rng.next_complex_normal(sig.p_var);
}

SplitAmplitudes beamsplit(std::complex<double> amplitude, double reflectivity) {
    if (reflectivity < 0.0 || reflectivity > 1.0)
        throw std::domain_error("reflectivity must lie in [0, 1]");
    return {amplitude * std::sqrt(1.0 - reflectivity),
            amplitude * std::sqrt(reflectivity)};
}

}  // namespace lcqkd
