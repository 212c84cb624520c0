#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "lcqkd/rng.hpp"
#include "lcqkd/security.hpp"
#include "lcqkd/signal.hpp"

using namespace lcqkd;

namespace {

double tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

struct McEstimate {
    double mean;
    double se;
};

// Monte Carlo reference for the mean tap overlap conditioned on a conclusive
// outcome. Draw the amplitude reaching the tap from its P-function, weight
// each draw by its conclusive probability downstream, and average the
// two-state overlap exp(-2 r_e |alpha|^2) under those weights. Batched so the
// ratio estimator gets an honest standard error.
McEstimate mc_overlap(double gamma, const LinkModel& link, double threshold,
                      int batches, int per_batch, std::uint64_t seed,
                      bool entropy_of_sample = false) {
    const double g1 = link.before_eve.gain, t1 = link.before_eve.transmission;
    const double g2 = link.after_eve.gain, t2 = link.after_eve.transmission;
    const double scale2 = std::sqrt(g2 * t2 * (1.0 - link.r_e));
    const double sd_det = std::sqrt(0.25 + (g2 - 1.0) / 2.0);

    std::vector<double> ratios;
    RandomStream rng(seed, RandomStream::kGeneric, 1);
    const GaussianSignal at_tap = propagate(std::complex<double>(gamma, 0.0),
                                            link.before_eve);
    for (int b = 0; b < batches; ++b) {
        double num = 0.0, den = 0.0;
        for (int i = 0; i < per_batch; ++i) {
            const std::complex<double> alpha = sample_alpha(at_tap, rng);
            const double mu = (alpha * scale2).real();
            const double w = tail((threshold - mu) / sd_det) + tail((threshold + mu) / sd_det);
            const double f = std::exp(-2.0 * link.r_e * std::norm(alpha));
            num += w * (entropy_of_sample ? binary_entropy((1.0 + f) / 2.0) : f);
            den += w;
        }
        ratios.push_back(num / den);
    }
    double m = 0.0;
    for (double r : ratios) m += r;
    m /= batches;
    double v = 0.0;
    for (double r : ratios) v += (r - m) * (r - m);
    v /= (batches - 1);
    return {m, std::sqrt(v / batches)};
}

LinkModel make_link(double dab, double dae, double spacing, double r_e) {
    LineGeometry line;
    line.dist_ab = dab;
    line.dist_ae = dae;
    line.spacing = spacing;
    line.attenuation = 0.02;
    line.r_e = r_e;
    return link_model(line);
}

}  // namespace

TEST_CASE("binary entropy endpoints, peak and symmetry") {
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    for (double p : {0.01, 0.2, 0.37}) {
        CHECK(binary_entropy(p) == doctest::Approx(binary_entropy(1.0 - p)).epsilon(1e-13));
        CHECK(binary_entropy(p) > 0.0);
        CHECK(binary_entropy(p) < 1.0);
    }
    CHECK_THROWS_AS(binary_entropy(-0.01), std::domain_error);
    CHECK_THROWS_AS(binary_entropy(1.01), std::domain_error);
}

TEST_CASE("tap overlap closed form hits its exact special cases") {
    const LinkModel benign = make_link(1000.0, 500.0, 50.0, 0.0);
    CHECK(eve_exp_term(10.0, benign, 5.0) == 1.0);
    // Unit overlap means indistinguishable states: zero leaked information.
    CHECK(eve_info_bound(10.0, benign, 5.0) == 0.0);

    // Tap right at Alice with zero threshold: the amplitude at the tap is
    // exactly gamma and every outcome is conclusive, so the mean overlap is
    // the deterministic exp(-2 r_e gamma^2).
    const LinkModel at_alice = make_link(1000.0, 0.0, 50.0, 0.01);
    for (double gamma : {0.5, 1.0, 3.0}) {
        CHECK(eve_exp_term(gamma, at_alice, 0.0) ==
              doctest::Approx(std::exp(-2.0 * 0.01 * gamma * gamma)).epsilon(1e-12));
    }
}

TEST_CASE("tap overlap closed form matches importance-sampled Monte Carlo") {
    struct Point {
        double dab, dae, spacing, r_e, gamma, theta;
    };
    const std::array<Point, 3> points = {{
        {1000.0, 500.0, 10.0, 0.01, 10.81, 9.82},
        {1000.0, 500.0, 50.0, 0.02, 15.0, 8.0},
        {200.0, 50.0, 50.0, 0.005, 6.0, 3.0},
    }};
    std::uint64_t seed = 21;
    for (const Point& pt : points) {
        const LinkModel link = make_link(pt.dab, pt.dae, pt.spacing, pt.r_e);
        const double closed = eve_exp_term(pt.gamma, link, pt.theta);
        const McEstimate mc = mc_overlap(pt.gamma, link, pt.theta, 16, 20000, seed++);
        CHECK(std::abs(closed - mc.mean) < 4.0 * mc.se + 1e-9);
    }
}

TEST_CASE("information bound dominates the sampled per-state entropy") {
    // h((1+x)/2) is concave in x, so the bound evaluated at the mean overlap
    // sits above the mean of the per-sample entropies.
    const LinkModel link = make_link(1000.0, 500.0, 10.0, 0.01);
    const double gamma = 10.81, theta = 9.82;
    const double bound = eve_info_bound(gamma, link, theta);
    const McEstimate mc = mc_overlap(gamma, link, theta, 16, 20000, 77, true);
    const double mean_entropy = binary_entropy((1.0 + mc.mean) / 2.0);
    CHECK(bound >= mean_entropy - 4.0 * mc.se);
    CHECK(bound <= 1.0);
    CHECK(bound >= 0.0);
}

TEST_CASE("key fraction combines its three factors") {
    const LinkModel link = make_link(1000.0, 500.0, 50.0, 0.01);
    const double gamma = 12.0, theta = 7.0;
    const KeyRateReport r = key_fraction(gamma, link, theta);
    const OutcomeProbs probs =
        outcome_probs(gamma, link.before_eve, link.after_eve, link.r_e, theta);
    CHECK(r.p_ok == doctest::Approx(probs.p_ok).epsilon(1e-14));
    CHECK(r.eve_bound == doctest::Approx(eve_info_bound(gamma, link, theta)).epsilon(1e-14));
    CHECK(r.bob_entropy ==
          doctest::Approx(binary_entropy(probs.p00 / probs.p_ok)).epsilon(1e-13));
    CHECK(r.raw_fraction ==
          doctest::Approx(r.p_ok * (1.0 - r.eve_bound - r.bob_entropy)).epsilon(1e-13));
    CHECK(r.fraction == std::max(0.0, r.raw_fraction));
    CHECK_FALSE(r.conclusive_underflow);
}

TEST_CASE("optimizer recovers a near-unit fraction on a benign line") {
    const LinkModel link = make_link(500.0, 250.0, 50.0, 0.0);
    const SecurityReport r = optimize_key_fraction(link);
    CHECK(r.fraction >= 0.999);
    CHECK(r.eve_bound == 0.0);  // eve_info_bound with overlap 1 gives h(1) = 0
    CHECK(r.p_ok >= 0.999);
    CHECK(r.gamma_opt >= 1.0);
}

TEST_CASE("optimizer honors fixed arguments") {
    const LinkModel link = make_link(1000.0, 500.0, 50.0, 0.01);
    const SecurityReport free_opt = optimize_key_fraction(link);
    const SecurityReport g_fixed = optimize_key_fraction(link, 9.0, {});
    CHECK(g_fixed.gamma_opt == 9.0);
    CHECK(g_fixed.fraction <= free_opt.fraction + 1e-9);
    const SecurityReport t_fixed = optimize_key_fraction(link, {}, 4.0);
    CHECK(t_fixed.theta_opt == 4.0);
    CHECK(t_fixed.fraction <= free_opt.fraction + 1e-9);
    const SecurityReport both = optimize_key_fraction(link, 9.0, 4.0);
    CHECK(both.gamma_opt == 9.0);
    CHECK(both.theta_opt == 4.0);
    const KeyRateReport direct = key_fraction(9.0, link, 4.0);
    CHECK(both.fraction == doctest::Approx(direct.fraction).epsilon(1e-13));

    CHECK_THROWS_AS(optimize_key_fraction(link, -1.0, {}), std::domain_error);
    CHECK_THROWS_AS(optimize_key_fraction(link, {}, -1.0), std::domain_error);
}

TEST_CASE("moving the tap closer to Bob never helps the key fraction") {
    double prev = 1e300;
    for (double dae : {100.0, 300.0, 500.0, 700.0, 900.0}) {
        const LinkModel link = make_link(1000.0, dae, 50.0, 0.01);
        const SecurityReport r = optimize_key_fraction(link);
        CHECK(r.fraction <= prev + 1e-9);
        prev = r.fraction;
    }
}

TEST_CASE("a stronger tap always leaks more") {
    const double gamma = 10.0, theta = 6.0;
    double prev_overlap = 2.0, prev_bound = -1.0;
    for (double r_e : {0.0, 0.005, 0.01, 0.02, 0.05}) {
        const LinkModel link = make_link(1000.0, 500.0, 50.0, r_e);
        const double overlap = eve_exp_term(gamma, link, theta);
        const double bound = eve_info_bound(gamma, link, theta);
        CHECK(overlap < prev_overlap);
        CHECK(bound > prev_bound);
        prev_overlap = overlap;
        prev_bound = bound;
    }
}
