#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "lcqkd/channels.hpp"
#include "lcqkd/detection.hpp"
#include "lcqkd/rng.hpp"

using namespace lcqkd;

namespace {

// Standard normal upper tail via the complementary error function.
double tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("q_distribution carries shot noise plus half the P-variance") {
    const GaussianSignal sig{std::complex<double>(1.7, -2.0), 3.0};
    const QDistribution d = q_distribution(sig);
    CHECK(d.mean == doctest::Approx(1.7).epsilon(1e-14));
    CHECK(d.variance == doctest::Approx(0.25 + 1.5).epsilon(1e-14));
}

TEST_CASE("classify treats boundary values as conclusive") {
    CHECK(classify(1.0, 1.0) == Outcome::bit0);
    CHECK(classify(-1.0, 1.0) == Outcome::bit1);
    CHECK(classify(0.999, 1.0) == Outcome::inconclusive);
    CHECK(classify(-0.999, 1.0) == Outcome::inconclusive);
    CHECK(classify(5.0, 1.0) == Outcome::bit0);
    CHECK(classify(-5.0, 1.0) == Outcome::bit1);
    // Zero threshold: everything is conclusive, sign decides.
    CHECK(classify(0.0, 0.0) == Outcome::bit0);
    CHECK(classify(1e-300, 0.0) == Outcome::bit0);
    CHECK(classify(-1e-300, 0.0) == Outcome::bit1);
    CHECK_THROWS_AS(classify(0.0, -1.0), std::domain_error);
}

TEST_CASE("outcome probabilities match the Gaussian tail formulas") {
    // Identity line, no tap: q ~ N(gamma, 1/4), threshold on the mean.
    const ChannelPair id{};
    const OutcomeProbs p = outcome_probs(1.0, id, id, 0.0, 1.0);
    CHECK(p.p00 == doctest::Approx(0.5).epsilon(1e-12));
    // Crossing to the wrong side needs a 4 sigma excursion: erfc(2 sqrt 2)/2.
    CHECK(p.p10 == doctest::Approx(3.16712418331e-5).epsilon(1e-9));
    CHECK(p.p00 == doctest::Approx(tail((1.0 - 1.0) / 0.5)).epsilon(1e-12));
    CHECK(p.p10 == doctest::Approx(tail((1.0 + 1.0) / 0.5)).epsilon(1e-12));

    // General point: reduced chain with noise, threshold inside the bulk.
    const ChannelPair seg = reduce_chain_preserving(0.1, 10);
    const double gamma = 8.0, theta = 5.0, r_e = 0.02;
    const OutcomeProbs g = outcome_probs(gamma, seg, seg, r_e, theta);
    const double mu = gamma * std::sqrt(1.0 - r_e);  // both segments are transparent
    const double var = 0.25 + (90.0 * (1.0 - r_e) + 90.0) / 2.0;
    const double sd = std::sqrt(var);
    CHECK(g.p00 == doctest::Approx(tail((theta - mu) / sd)).epsilon(1e-12));
    CHECK(g.p10 == doctest::Approx(tail((theta + mu) / sd)).epsilon(1e-12));
    CHECK(g.p_ok == doctest::Approx(g.p00 + g.p10).epsilon(1e-13));
}

TEST_CASE("outcome probabilities are symmetric in the sent bit") {
    const ChannelPair seg = reduce_chain_preserving(0.1, 4);
    for (double theta : {0.0, 1.0, 6.0}) {
        const OutcomeProbs p = outcome_probs(5.0, seg, seg, 0.01, theta);
        CHECK(p.p00 == p.p11);
        CHECK(p.p01 == p.p10);
        CHECK(p.p_ok <= 1.0 + 1e-15);
        CHECK(p.p_ok >= 0.0);
    }
    // Zero threshold leaves no inconclusive band.
    const OutcomeProbs all = outcome_probs(2.0, seg, seg, 0.0, 0.0);
    CHECK(all.p_ok == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(all.p00 + all.p10 == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("raising the threshold only shrinks the conclusive probability") {
    const ChannelPair seg = reduce_chain_preserving(0.1, 10);
    double prev = 2.0;
    for (double theta : {0.0, 2.0, 5.0, 10.0, 20.0}) {
        const OutcomeProbs p = outcome_probs(8.0, seg, seg, 0.01, theta);
        CHECK(p.p_ok < prev);
        prev = p.p_ok;
    }
}

TEST_CASE("sampled outcomes reproduce the analytic probabilities") {
    const ChannelPair seg = reduce_chain_preserving(0.1, 10);
    struct Grid {
        double gamma, r_e, theta;
    };
    for (const Grid& pt : {Grid{10.0, 0.01, 9.0}, Grid{6.0, 0.0, 4.0}, Grid{15.0, 0.05, 0.0}}) {
        const OutcomeProbs want = outcome_probs(pt.gamma, seg, seg, pt.r_e, pt.theta);
        RandomStream rng(11, RandomStream::kRounds, 0);
        const int n = 200000;
        int n0 = 0, n_ok = 0, n_err = 0;
        for (int i = 0; i < n; ++i) {
            const RoundSample s = sample_outcome(0, pt.gamma, seg, seg, pt.r_e, pt.theta, rng);
            CHECK(s.outcome == classify(s.q, pt.theta));
            if (s.outcome == Outcome::bit0) ++n0;
            if (s.outcome != Outcome::inconclusive) ++n_ok;
            if (s.error) ++n_err;
        }
        auto sigma = [&](double p) { return std::sqrt(std::max(p * (1.0 - p), 1e-12) / n); };
        CHECK(std::abs(double(n0) / n - want.p00) < 4.0 * sigma(want.p00));
        CHECK(std::abs(double(n_ok) / n - want.p_ok) < 4.0 * sigma(want.p_ok));
        CHECK(std::abs(double(n_err) / n - want.p10) < 4.0 * sigma(want.p10) + 2.0 / n);
    }
}

TEST_CASE("bit 1 mirrors bit 0 and the tap amplitude scales with r_e") {
    const ChannelPair seg = reduce_chain_preserving(0.1, 10);
    RandomStream rng(3, RandomStream::kRounds, 5);
    const RoundSample one = sample_outcome(1, 10.0, seg, seg, 0.02, 5.0, rng);
    CHECK((one.outcome == Outcome::bit1 || one.outcome == Outcome::bit0 ||
           one.outcome == Outcome::inconclusive));

    // No tap: nothing is diverted, ever.
    RandomStream rng2(3, RandomStream::kRounds, 5);
    for (int i = 0; i < 50; ++i) {
        const RoundSample s = sample_outcome(i & 1, 10.0, seg, seg, 0.0, 5.0, rng2);
        CHECK(s.eve_amplitude == std::complex<double>(0.0, 0.0));
    }

    // Identical streams replay the identical sample.
    RandomStream a(9, RandomStream::kRounds, 123), b(9, RandomStream::kRounds, 123);
    const RoundSample sa = sample_outcome(1, 8.0, seg, seg, 0.01, 6.0, a);
    const RoundSample sb = sample_outcome(1, 8.0, seg, seg, 0.01, 6.0, b);
    CHECK(sa.q == sb.q);
    CHECK(sa.outcome == sb.outcome);
    CHECK(sa.eve_amplitude == sb.eve_amplitude);

    CHECK_THROWS_AS(sample_outcome(2, 8.0, seg, seg, 0.01, 6.0, a), std::domain_error);
}
