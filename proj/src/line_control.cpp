#include "lcqkd/line_control.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lcqkd/signal.hpp"

namespace lcqkd {

namespace {

constexpr double kPlanck = 6.62607015e-34;  // J s

void check_fraction(double x, const char* what) {
    if (x < 0.0 || x >= 1.0 || !std::isfinite(x))
        throw std::domain_error(std::string(what) + " must lie in [0, 1)");
}

}  // namespace

double infer_r_e(double r_0, double r_t) {
    check_fraction(r_0, "intrinsic loss");
    check_fraction(r_t, "total loss");
    if (r_t < r_0)
        throw std::domain_error("total loss cannot be smaller than the intrinsic loss");
    return 1.0 - (1.0 - r_t) / (1.0 - r_0);
}

double test_pulse_photons(const TestPulseSpec& spec) {
    if (spec.power_watts < 0.0 || spec.duration_s < 0.0)
        throw std::domain_error("pulse power and duration must be non-negative");
    if (!(spec.frequency_hz > 0.0))
        throw std::domain_error("carrier frequency must be positive");
    return spec.power_watts * spec.duration_s / (kPlanck * spec.frequency_hz);
}

double min_detectable_leakage(double test_photons, double stage_transmission,
                              std::size_t stages) {
    if (!(test_photons > 0.0))
        throw std::domain_error("test pulse must contain photons");
    const double var = chain_photon_variance(test_photons, stage_transmission, stages);
    return std::sqrt(var) / test_photons;
}

ProbeResult simulate_loss_probe(double true_r_t, double r_0, double test_photons,
                                double stage_transmission, std::size_t stages,
                                RandomStream& rng) {
    check_fraction(true_r_t, "total loss");
    check_fraction(r_0, "intrinsic loss");
    if (!(test_photons > 0.0))
        throw std::domain_error("test pulse must contain photons");

    // The chain holds the mean at (1 - r_t) n and adds amplifier noise; at
    // probe intensities the count distribution is indistinguishable from
    // normal with the exact chain variance.
    const double mean = (1.0 - true_r_t) * test_photons;
    const double sd = std::sqrt(chain_photon_variance(mean, stage_transmission, stages));
    const double measured = mean + sd * rng.next_normal();

    ProbeResult out;
    out.r_t_estimate = 1.0 - measured / test_photons;
    const double resolution =
        min_detectable_leakage(test_photons, stage_transmission, stages);
    out.flagged = (out.r_t_estimate - r_0) > 3.0 * resolution;
    return out;
}

}  // namespace lcqkd
