#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "lcqkd/channels.hpp"
#include "lcqkd/rng.hpp"
#include "lcqkd/signal.hpp"

using namespace lcqkd;

namespace {

// Exact geometric photon statistics of a thermal state with mean n̄.
double thermal_pmf(std::size_t n, double nbar) {
    return std::pow(nbar / (1.0 + nbar), double(n)) / (1.0 + nbar);
}

double poisson_pmf(std::size_t n, double mean) {
    return std::exp(double(n) * std::log(mean) - mean - std::lgamma(double(n) + 1.0));
}

double pmf_mean(const std::vector<double>& p) {
    double m = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) m += double(n) * p[n];
    return m;
}

double pmf_var(const std::vector<double>& p) {
    const double m = pmf_mean(p);
    double s = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) s += (double(n) - m) * (double(n) - m) * p[n];
    return s;
}

}  // namespace

TEST_CASE("propagate scales the centre by sqrt(GT) and adds amplifier noise") {
    const ChannelPair pair = reduce_chain_preserving(0.1, 10);  // (0.1/9.1, 91)
    const GaussianSignal out = propagate(std::complex<double>(10.0, 0.0), pair);
    // Transparent chain: GT = 1, so the centre is unchanged.
    CHECK(out.center.real() == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(out.center.imag() == 0.0);
    CHECK(out.p_var == doctest::Approx(90.0).epsilon(1e-12));
    CHECK(photon_mean(out) == doctest::Approx(190.0).epsilon(1e-12));

    // Non-transparent pair: centre picks up sqrt(GT).
    const ChannelPair amp{0.5, 4.0};
    const GaussianSignal out2 = propagate(std::complex<double>(1.0, 2.0), amp);
    CHECK(std::abs(out2.center - std::complex<double>(1.0, 2.0) * std::sqrt(2.0)) < 1e-12);
    CHECK(out2.p_var == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("propagating a signal composes affinely with its variance") {
    GaussianSignal sig{std::complex<double>(2.0, -1.0), 0.7};
    const ChannelPair pair{0.3, 5.0};
    const GaussianSignal out = propagate(sig, pair);
    CHECK(out.p_var == doctest::Approx(5.0 * 0.3 * 0.7 + 4.0).epsilon(1e-13));
    CHECK(std::abs(out.center - sig.center * std::sqrt(1.5)) < 1e-12);

    // Propagating through two pairs equals propagating through their reduction.
    const ChannelPair a{0.5, 3.0}, b{0.25, 8.0};
    const GaussianSignal two_step = propagate(propagate(sig, a), b);
    // Manual composition of the affine maps.
    const double slope = (a.gain * a.transmission) * (b.gain * b.transmission);
    const double offset = b.gain * b.transmission * (a.gain - 1.0) + (b.gain - 1.0);
    CHECK(two_step.p_var == doctest::Approx(slope * sig.p_var + offset).epsilon(1e-12));
}

TEST_CASE("apply_loss scales centre by sqrt(T) and variance by T") {
    GaussianSignal sig{std::complex<double>(3.0, 4.0), 2.0};
    const GaussianSignal out = apply_loss(sig, 0.25);
    CHECK(std::abs(out.center - std::complex<double>(1.5, 2.0)) < 1e-13);
    CHECK(out.p_var == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(apply_loss(sig, 0.0), std::domain_error);
    CHECK_THROWS_AS(apply_loss(sig, 1.0 + 1e-9), std::domain_error);
}

TEST_CASE("photon moments match the displaced-thermal closed forms") {
    const GaussianSignal sig{std::complex<double>(1.5, -0.5), 0.8};
    const double c2 = 1.5 * 1.5 + 0.25;
    CHECK(photon_mean(sig) == doctest::Approx(c2 + 0.8).epsilon(1e-14));
    CHECK(photon_variance(sig) ==
          doctest::Approx(c2 * (1.0 + 1.6) + 0.8 * 1.8).epsilon(1e-14));

    // Coherent state: Poissonian, variance equals mean.
    const GaussianSignal coh{std::complex<double>(2.0, 1.0), 0.0};
    CHECK(photon_variance(coh) == doctest::Approx(photon_mean(coh)).epsilon(1e-14));
}

TEST_CASE("chain photon variance follows the closed form") {
    // M transparent stages add M(1-T)/T of P-variance to a signal of mean n.
    const double n = 100.0;
    for (double t : {0.1, 0.5}) {
        for (std::size_t m : {std::size_t{1}, std::size_t{10}, std::size_t{400}}) {
            const double v = double(m) * (1.0 - t) / t;
            const double expected = n * (1.0 + 2.0 * v) + v * (1.0 + v);
            CHECK(chain_photon_variance(n, t, m) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("photon pmf reduces to exact thermal and Poisson laws") {
    // Zero displacement: geometric distribution.
    const GaussianSignal th{std::complex<double>(0.0, 0.0), 2.5};
    const std::vector<double> p = photon_number_pmf(th, 60);
    for (std::size_t n = 0; n <= 60; ++n)
        CHECK(p[n] == doctest::Approx(thermal_pmf(n, 2.5)).epsilon(1e-11));

    // Zero variance: Poisson with mean |c|^2.
    const GaussianSignal coh{std::complex<double>(1.2, 0.9), 0.0};
    const double mean = 1.2 * 1.2 + 0.9 * 0.9;
    const std::vector<double> q = photon_number_pmf(coh, 40);
    for (std::size_t n = 0; n <= 40; ++n)
        CHECK(q[n] == doctest::Approx(poisson_pmf(n, mean)).epsilon(1e-10));
}

TEST_CASE("photon pmf moments agree with the closed-form mean and variance") {
    const GaussianSignal sig{std::complex<double>(1.8, 0.0), 1.2};
    const std::vector<double> p = photon_number_pmf(sig, 120);
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(pmf_mean(p) == doctest::Approx(photon_mean(sig)).epsilon(1e-8));
    CHECK(pmf_var(p) == doctest::Approx(photon_variance(sig)).epsilon(1e-6));
}

TEST_CASE("sample_alpha reproduces the P-function statistics") {
    const GaussianSignal sig{std::complex<double>(2.0, -1.0), 1.5};
    RandomStream rng(7, RandomStream::kGeneric, 0);
    const int n = 200000;
    double sr = 0.0, si = 0.0, svar = 0.0;
    for (int i = 0; i < n; ++i) {
        const std::complex<double> a = sample_alpha(sig, rng);
        sr += a.real();
        si += a.imag();
        svar += std::norm(a - sig.center);
    }
    const double se_mean = std::sqrt(sig.p_var / 2.0 / n);
    CHECK(std::abs(sr / n - 2.0) < 5.0 * se_mean);
    CHECK(std::abs(si / n + 1.0) < 5.0 * se_mean);
    // Total variance across both quadratures concentrates around p_var.
    CHECK(svar / n == doctest::Approx(1.5).epsilon(0.02));

    // Zero variance: always exactly the centre.
    const GaussianSignal pure{std::complex<double>(0.5, 0.5), 0.0};
    CHECK(sample_alpha(pure, rng) == pure.center);
}

TEST_CASE("beamsplit conserves energy and splits by reflectivity") {
    const std::complex<double> a(3.0, -4.0);
    const SplitAmplitudes s = beamsplit(a, 0.19);
    CHECK(std::norm(s.kept) + std::norm(s.tapped) == doctest::Approx(std::norm(a)).epsilon(1e-13));
    CHECK(std::norm(s.tapped) == doctest::Approx(0.19 * std::norm(a)).epsilon(1e-13));
    const SplitAmplitudes none = beamsplit(a, 0.0);
    CHECK(none.kept == a);
    CHECK(std::norm(none.tapped) == 0.0);
    CHECK_THROWS_AS(beamsplit(a, -0.1), std::domain_error);
    CHECK_THROWS_AS(beamsplit(a, 1.1), std::domain_error);
}
