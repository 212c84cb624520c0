#include "lcqkd/channels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lcqkd {

namespace {

// Below this distance from GT = 1 the generic closed form loses all precision
// to cancellation, so the transparent-chain formula takes over.
constexpr double kTransparentWindow = 1e-9;

void check_transmission(double t, const char* what) {
    if (!(t > 0.0) || t > 1.0)
        throw std::domain_error(std::string(what) + " must lie in (0, 1], got " + std::to_string(t));
}

void check_gain(double g, const char* what) {
    if (!(g >= 1.0) || !std::isfinite(g))
        throw std::domain_error(std::string(what) + " must be >= 1, got " + std::to_string(g));
}

std::size_t stage_count(double distance, double spacing, const char* what) {
    const double ratio = distance / spacing;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, std::abs(ratio)))
        throw std::domain_error(std::string(what) +
                                " must be an integer multiple of the spacing, got ratio " +
                                std::to_string(ratio));
    if (rounded < 0.0)
        throw std::domain_error(std::string(what) + " must be non-negative");
    return static_cast<std::size_t>(rounded);
}

}  // namespace

double compose_losses(double t1, double t2) {
    check_transmission(t1, "transmission");
    check_transmission(t2, "transmission");
    return t1 * t2;
}

double compose_amps(double g1, double g2) {
    check_gain(g1, "gain");
    check_gain(g2, "gain");
    return g1 * g2;
}

ChannelPair swap_amp_loss(double gain_before, double transmission_after) {
    check_gain(gain_before, "gain");
    check_transmission(transmission_after, "transmission");
    const double g = (gain_before - 1.0) * transmission_after + 1.0;
    const double t = gain_before * transmission_after / g;
    return {t, g};
}

LogChannelPair reduce_chain_log(double gain, double transmission, std::size_t stages) {
    check_gain(gain, "gain");
    check_transmission(transmission, "transmission");
    if (stages < 1) throw std::domain_error("stage count must be >= 1");

    const double mu = gain * transmission;
    const double m = static_cast<double>(stages);

    if (std::abs(mu - 1.0) < kTransparentWindow) {
        // G = 1/T up to rounding: the generic denominator GT - 1 vanishes.
        const double g = gain * (m * (1.0 - transmission) + transmission);
        const double log_g = std::log(g);
        return {m * std::log(mu) - log_g, log_g};
    }

    const double log_mu = std::log(mu);
    double log_g;
    if (mu > 1.0) {
        // Factor out the growing (GT)^M so only a bounded correction is
        // exponentiated.
        const double rest = (gain - 1.0) + gain * (transmission - 1.0) * std::exp(-m * log_mu);
        log_g = m * log_mu + std::log(rest) - std::log(mu - 1.0);
    } else {
        // (GT)^M decays; keep it as the additive correction instead.
        const double rest = gain * (1.0 - transmission) - (gain - 1.0) * std::exp(m * log_mu);
        log_g = std::log(rest) - std::log(1.0 - mu);
    }
    return {m * log_mu - log_g, log_g};
}

ChannelPair reduce_chain(double gain, double transmission, std::size_t stages) {
    const LogChannelPair lp = reduce_chain_log(gain, transmission, stages);
    return {std::exp(lp.log_transmission), std::exp(lp.log_gain)};
}

ChannelPair reduce_chain_preserving(double transmission, std::size_t stages) {
    check_transmission(transmission, "transmission");
    if (stages < 1) throw std::domain_error("stage count must be >= 1");
    const double m = static_cast<double>(stages);
    const double denom = m * (1.0 - transmission) + transmission;
    return {transmission / denom, denom / transmission};
}

SegmentParams segment_params(const LineGeometry& line) {
    if (!(line.spacing > 0.0))
        throw std::domain_error("spacing must be positive");
    if (line.attenuation < 0.0)
        throw std::domain_error("attenuation must be non-negative");
    if (line.dist_ae < 0.0 || line.dist_ae > line.dist_ab)
        throw std::domain_error("tap position must lie between the endpoints");

    SegmentParams out;
    out.stages_before = stage_count(line.dist_ae, line.spacing, "tap distance");
    out.stages_after =
        stage_count(line.dist_ab - line.dist_ae, line.spacing, "remaining distance");
    out.stage_transmission = std::pow(10.0, -line.attenuation * line.spacing);
    if (out.stages_before > 0)
        out.before_eve = reduce_chain_preserving(out.stage_transmission, out.stages_before);
    if (out.stages_after > 0)
        out.after_eve = reduce_chain_preserving(out.stage_transmission, out.stages_after);
    return out;
}

}  // namespace lcqkd
