#include "lcqkd/security.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace lcqkd {

namespace {

// Below this conclusive probability the per-bit quantities are numerically
// meaningless; the rate is reported as zero with a flag instead.
constexpr double kConclusiveFloor = 1e-300;

constexpr double kGammaMin = 1.0;
constexpr double kGammaMax = 1e5;
constexpr double kRatioMax = 10.0;  // theta is searched within [0, 10 gamma]

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

LinkModel link_model(const LineGeometry& line) {
    const SegmentParams seg = segment_params(line);
    return {seg.before_eve, seg.after_eve, line.r_e};
}

double binary_entropy(double p) {
    if (p < 0.0 || p > 1.0)
        throw std::domain_error("binary_entropy argument must lie in [0, 1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double eve_exp_term(double gamma, const LinkModel& link, double threshold) {
    if (link.r_e == 0.0) return 1.0;  // nothing is diverted, overlap is exact
    const OutcomeProbs probs =
        outcome_probs(gamma, link.before_eve, link.after_eve, link.r_e, threshold);
    if (probs.p_ok < kConclusiveFloor)
        throw std::domain_error("conclusive probability underflowed");

    const double t1 = link.before_eve.transmission, g1 = link.before_eve.gain;
    const double t2 = link.after_eve.transmission, g2 = link.after_eve.gain;
    const double e1 = g1 - 1.0, e2 = g2 - 1.0;
    const double re = link.r_e;

    // Gaussian integral of the overlap against the conclusive window. The
    // tap exposure tilts the amplitude distribution at the tap (weight w) and
    // shifts the effective detection mean and variance.
    const double w = 1.0 + 2.0 * re * e1;
    const double pre = std::exp(-2.0 * re * g1 * t1 * gamma * gamma / w) / w;
    const double mean_bob = gamma * std::sqrt((1.0 - re) * g2 * t2 * g1 * t1);
    const double var_eff = (2.0 * e2 + 1.0) / 2.0 + (1.0 - re) * g2 * t2 * e1 / w;
    const double s = std::sqrt(var_eff);
    const double tails = 0.5 * std::erfc((threshold - mean_bob / w) / s) +
                         0.5 * std::erfc((threshold + mean_bob / w) / s);
    return clamp01(pre * tails / probs.p_ok);
}

double eve_info_bound(double gamma, const LinkModel& link, double threshold) {
    return binary_entropy((1.0 + eve_exp_term(gamma, link, threshold)) / 2.0);
}

double bob_cond_entropy(const OutcomeProbs& probs) {
    if (probs.p_ok < kConclusiveFloor)
        throw std::domain_error("conclusive probability underflowed");
    return binary_entropy(clamp01(probs.p00 / probs.p_ok));
}

KeyRateReport key_fraction(double gamma, const LinkModel& link, double threshold) {
    KeyRateReport out;
    const OutcomeProbs probs =
        outcome_probs(gamma, link.before_eve, link.after_eve, link.r_e, threshold);
    out.p_ok = probs.p_ok;
    if (probs.p_ok < kConclusiveFloor) {
        out.conclusive_underflow = true;
        return out;
    }
    out.eve_bound = eve_info_bound(gamma, link, threshold);
    out.bob_entropy = bob_cond_entropy(probs);
    out.raw_fraction = probs.p_ok * (1.0 - out.eve_bound - out.bob_entropy);
    out.fraction = std::max(0.0, out.raw_fraction);
    return out;
}

namespace {

// Objective for the optimizer: the unclamped fraction, so the search stays
// well ordered even where the rate is negative everywhere.
double objective(double gamma, double theta, const LinkModel& link) {
    const KeyRateReport r = key_fraction(gamma, link, theta);
    if (r.conclusive_underflow) return -1e18;
    return r.raw_fraction;
}

struct Best {
    double value = -1e300;
    double gamma = kGammaMin;
    double theta = 0.0;

    void consider(double v, double g, double t) {
        if (v > value) {
            value = v;
            gamma = g;
            theta = t;
        }
    }
};

// Golden-section maximization over one coordinate, used when the other
// argument is pinned. Deterministic.
template <typename F>
double golden_max(F f, double lo, double hi, int iters = 80) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return (fc > fd) ? c : d;
}

// Nelder-Mead over (ln gamma, theta/gamma), clamped to the search box.
// Fixed iteration budget keeps it deterministic.
Best simplex_refine(const LinkModel& link, double lng0, double t0) {
    const double lng_min = std::log(kGammaMin), lng_max = std::log(kGammaMax);
    auto eval = [&](double lng, double t) {
        lng = std::clamp(lng, lng_min, lng_max);
        t = std::clamp(t, 0.0, kRatioMax);
        const double g = std::exp(lng);
        return objective(g, t * g, link);
    };

    struct Pt {
        double x, y, f;
    };
    std::array<Pt, 3> s{{{lng0, t0, eval(lng0, t0)},
                         {lng0 + 0.4, t0, eval(lng0 + 0.4, t0)},
                         {lng0, t0 + 0.25, eval(lng0, t0 + 0.25)}}};
    auto order = [&] {
        std::sort(s.begin(), s.end(), [](const Pt& a, const Pt& b) { return a.f > b.f; });
    };
    order();
    for (int it = 0; it < 200; ++it) {
        const double cx = (s[0].x + s[1].x) / 2.0, cy = (s[0].y + s[1].y) / 2.0;
        const double rx = cx + (cx - s[2].x), ry = cy + (cy - s[2].y);
        const double fr = eval(rx, ry);
        if (fr > s[0].f) {
            const double ex = cx + 2.0 * (cx - s[2].x), ey = cy + 2.0 * (cy - s[2].y);
            const double fe = eval(ex, ey);
            s[2] = (fe > fr) ? Pt{ex, ey, fe} : Pt{rx, ry, fr};
        } else if (fr > s[1].f) {
            s[2] = {rx, ry, fr};
        } else {
            const double kx = cx + 0.5 * (s[2].x - cx), ky = cy + 0.5 * (s[2].y - cy);
            const double fk = eval(kx, ky);
            if (fk > s[2].f) {
                s[2] = {kx, ky, fk};
            } else {
                for (int i = 1; i < 3; ++i) {
                    s[i].x = s[0].x + 0.5 * (s[i].x - s[0].x);
                    s[i].y = s[0].y + 0.5 * (s[i].y - s[0].y);
                    s[i].f = eval(s[i].x, s[i].y);
                }
            }
        }
        order();
        if (std::abs(s[0].x - s[2].x) + std::abs(s[0].y - s[2].y) < 1e-10) break;
    }
    Best b;
    const double lng = std::clamp(s[0].x, lng_min, lng_max);
    const double t = std::clamp(s[0].y, 0.0, kRatioMax);
    b.consider(s[0].f, std::exp(lng), t * std::exp(lng));
    return b;
}

}  // namespace

SecurityReport optimize_key_fraction(const LinkModel& link,
                                     std::optional<double> fixed_gamma,
                                     std::optional<double> fixed_theta) {
    if (fixed_gamma && (!(*fixed_gamma > 0.0) || !std::isfinite(*fixed_gamma)))
        throw std::domain_error("fixed gamma must be positive and finite");
    if (fixed_theta && (*fixed_theta < 0.0 || !std::isfinite(*fixed_theta)))
        throw std::domain_error("fixed theta must be finite and non-negative");

    Best best;

    if (fixed_gamma && fixed_theta) {
        best.consider(objective(*fixed_gamma, *fixed_theta, link), *fixed_gamma,
                      *fixed_theta);
    } else if (fixed_gamma) {
        const double g = *fixed_gamma;
        for (int i = 0; i <= 32; ++i) {
            const double t = kRatioMax * static_cast<double>(i) / 32.0;
            best.consider(objective(g, t * g, link), g, t * g);
        }
        const double t_ref = golden_max(
            [&](double t) { return objective(g, t * g, link); },
            std::max(0.0, best.theta / g - 0.4), std::min(kRatioMax, best.theta / g + 0.4));
        best.consider(objective(g, t_ref * g, link), g, t_ref * g);
    } else if (fixed_theta) {
        const double th = *fixed_theta;
        const double lng_lo = std::log(std::max(kGammaMin, th / kRatioMax));
        const double lng_hi = std::log(kGammaMax);
        for (int i = 0; i <= 40; ++i) {
            const double lng = lng_lo + (lng_hi - lng_lo) * static_cast<double>(i) / 40.0;
            best.consider(objective(std::exp(lng), th, link), std::exp(lng), th);
        }
        const double lg_ref = golden_max(
            [&](double lng) { return objective(std::exp(lng), th, link); },
            std::max(lng_lo, std::log(best.gamma) - 0.4),
            std::min(lng_hi, std::log(best.gamma) + 0.4));
        best.consider(objective(std::exp(lg_ref), th, link), std::exp(lg_ref), th);
    } else {
        // Coarse grid: 21 log-spaced gamma values, theta/gamma in {0} plus 16
        // log-spaced ratios.
        for (int i = 0; i <= 20; ++i) {
            const double lng = std::log(kGammaMax) * static_cast<double>(i) / 20.0;
            const double g = std::exp(lng);
            for (int j = -1; j < 16; ++j) {
                const double t =
                    (j < 0) ? 0.0
                            : 0.05 * std::pow(kRatioMax / 0.05, static_cast<double>(j) / 15.0);
                best.consider(objective(g, t * g, link), g, t * g);
            }
        }
        const Best refined =
            simplex_refine(link, std::log(best.gamma), best.theta / best.gamma);
        if (refined.value > best.value) best = refined;
    }

    SecurityReport out;
    static_cast<KeyRateReport&>(out) = key_fraction(best.gamma, link, best.theta);
    out.gamma_opt = best.gamma;
    out.theta_opt = best.theta;
    return out;
}

}  // namespace lcqkd
