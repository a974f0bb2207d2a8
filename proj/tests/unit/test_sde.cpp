#include <gtest/gtest.h>

#include <cmath>

#include "burstlab/error.hpp"
#include "burstlab/histogram.hpp"
#include "burstlab/sde.hpp"
#include "burstlab/spectral.hpp"
#include "burstlab/stats.hpp"
#include "oracles.hpp"

using namespace burstlab;

namespace {

double histogram_slope(const UniformSeries& x, double lo, double hi) {
    auto h = log_histogram(x.values(), 1.0, 1e3, 10);
    return -fit_power_law(h, lo, hi, false).exponent;
}

}  // namespace

TEST(SdeParams, Validation) {
    SdeParams p;
    EXPECT_NO_THROW(p.validate());
    auto bad = p;
    bad.eta = 1.0;
    EXPECT_THROW(bad.validate(), ValidationError);
    bad = p;
    bad.kappa = 0.0;
    EXPECT_THROW(bad.validate(), ValidationError);
    bad = p;
    bad.x0 = 0.5;
    EXPECT_THROW(bad.validate(), ValidationError);
    bad = p;
    bad.x_max = 0.5;
    EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(SimulateSde, RejectsShortDuration) {
    EXPECT_THROW(simulate_sde(SdeParams{}, 99e-3, 1e-3, 1), ValidationError);
    EXPECT_NO_THROW(simulate_sde(SdeParams{}, 100e-3, 1e-3, 1));
}

TEST(SimulateSde, OutputGridAndLength) {
    auto x = simulate_sde(SdeParams{}, 1.0, 1e-3, 7);
    EXPECT_EQ(x.size(), 1000u);
    EXPECT_EQ(x.dt(), 1e-3);
    EXPECT_EQ(x.t0(), 1e-3);
}

TEST(SimulateSde, SameSeedSamePath) {
    SdeParams p;
    auto a = simulate_sde(p, 2.0, 1e-3, 99);
    auto b = simulate_sde(p, 2.0, 1e-3, 99);
    auto c = simulate_sde(p, 2.0, 1e-3, 100);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
}

TEST(SimulateSde, StaysInsideBoundaries) {
    for (double lambda : {3.0, 4.0}) {
        SdeParams p;
        p.lambda = lambda;
        p.x_max = 50.0;
        auto x = simulate_sde(p, 20.0, 2e-5, 5);
        for (double v : x.values()) {
            ASSERT_GE(v, p.x_min);
            ASSERT_LE(v, p.x_max);
        }
    }
}

TEST(SimulateSde, DriftAloneMovesUpFromLowerBoundary) {
    SdeParams p;  // eta - lambda / 2 = 1 > 0
    p.x0 = p.x_min;
    auto x = simulate_sde(p, 0.1, 1e-3, 1, SdeControls{true});
    double prev = p.x0;
    for (double v : x.values()) {
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(SimulateSde, DriftAloneFollowsClosedForm) {
    // dx/dt = c x^4 with c = 1 gives x(t) = (x0^-3 - 3 c t)^(-1/3)
    SdeParams p;
    p.kappa = 0.01;
    p.x0 = 1.0;
    auto x = simulate_sde(p, 0.1, 1e-3, 1, SdeControls{true});
    const double t = x.time_at(x.size() - 1);
    const double exact = std::pow(1.0 - 3.0 * t, -1.0 / 3.0);
    EXPECT_NEAR(x[x.size() - 1] / exact, 1.0, 2e-3);
}

TEST(SimulateSde, StationaryHistogramSlopeMatchesLambda) {
    SdeParams p;
    auto x = simulate_sde(p, 200.0, 2e-5, 2024);  // 1e7 samples
    EXPECT_NEAR(histogram_slope(x, 3.0, 300.0), -3.0, 0.1);
}

TEST(SimulateSde, HalvingKappaKeepsSlopeWithinMonteCarloError) {
    SdeParams p;
    std::vector<double> slopes;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) slopes.push_back(histogram_slope(simulate_sde(p, 40.0, 2e-5, seed), 3.0, 300.0));
    const double spread = sample_std(slopes);
    p.kappa = 0.05;
    const double fine = histogram_slope(simulate_sde(p, 40.0, 2e-5, 77), 3.0, 300.0);
    EXPECT_LT(std::fabs(fine - mean(slopes)), 3.0 * spread * std::sqrt(1.0 + 1.0 / 4.0) + 0.02);
}

TEST(StationaryPdfTheory, ClosedFormExamples) {
    SdeParams p;
    p.lambda = 2.0;
    p.x_max = 100.0;
    EXPECT_NEAR(stationary_pdf_theory(p, 1.0), 100.0 / 99.0, 1e-14);
    p.lambda = 1.0 + 1e-14;
    EXPECT_NEAR(stationary_pdf_theory(p, 1.0), 1.0 / std::log(100.0), 1e-12);
    EXPECT_THROW(stationary_pdf_theory(p, 0.5), ValidationError);
    EXPECT_THROW(stationary_pdf_theory(p, 101.0), ValidationError);
}

TEST(StationaryPdfTheory, IntegratesToOne) {
    for (double lambda : {1.5, 2.0, 3.0, 4.0}) {
        SdeParams p;
        p.lambda = lambda;
        const auto f = [&](double u) { return stationary_pdf_theory(p, std::exp(u)) * std::exp(u); };
        EXPECT_NEAR(oracle::simpson(f, 0.0, std::log(p.x_max), 4000), 1.0, 1e-10);
    }
}

TEST(PsdExponentTheory, Examples) {
    SdeParams p;
    auto e = psd_exponent_theory(p);
    EXPECT_DOUBLE_EQ(e.beta, 1.0);
    EXPECT_DOUBLE_EQ(e.hurst, 0.0);
    p.lambda = 4.0;
    e = psd_exponent_theory(p);
    EXPECT_NEAR(e.beta, 4.0 / 3.0, 1e-15);
    EXPECT_NEAR(e.hurst, 1.0 / 6.0, 1e-15);
}

TEST(TransitionScaling, IdentityScaleIsNull) {
    SdeParams p;
    p.kappa = 0.03;
    auto pair = transition_scaling_samples(p, 10.0, 1.0, 2e-5, 20000, 5);
    EXPECT_FALSE(pair.boundary_warning);
    EXPECT_GT(ks_two_sample(pair.direct_samples, pair.rescaled_samples).p_value, 0.01);
    EXPECT_EQ(pair.direct.total(), 20000u);
    EXPECT_EQ(pair.direct.edges, pair.rescaled.edges);
}

TEST(TransitionScaling, ModelExponentPassesWrongExponentFails) {
    SdeParams p;
    p.kappa = 0.03;
    auto good = transition_scaling_samples(p, 10.0, 2.0, 2.5e-6, 20000, 4);
    EXPECT_FALSE(good.boundary_warning);
    EXPECT_DOUBLE_EQ(good.direct_horizon, 8.0 * 2.5e-6);
    EXPECT_GT(ks_two_sample(good.direct_samples, good.rescaled_samples).p_value, 0.01);
    TransitionOptions wrong;
    wrong.time_exponent = 2.0;
    auto bad = transition_scaling_samples(p, 10.0, 2.0, 2.5e-6, 20000, 4, wrong);
    EXPECT_LT(ks_two_sample(bad.direct_samples, bad.rescaled_samples).p_value, 0.01);
}

TEST(TransitionScaling, FlagsBoundaryContamination) {
    SdeParams p;
    auto pair = transition_scaling_samples(p, 1.05, 1.0, 1e-1, 2000, 3);
    EXPECT_TRUE(pair.boundary_warning);
    EXPECT_GT(pair.boundary_fraction, 0.01);
}

TEST(ModelReturns, NoEndogenousImpactGivesGaussianNoise) {
    SdeParams p;
    ReturnModelParams rm{0.0, 1.0, 1e-3, true};
    auto r = generate_model_returns(p, rm, 100.0, 8);
    EXPECT_NEAR(sample_std(r.returns.values()), 1.0, 1e-12);
    std::vector<double> v(r.returns.values().begin(), r.returns.values().end());
    EXPECT_NEAR(oracle::autocovariance(v, 1), 0.0, 0.02);
    const auto normal_cdf = [](double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); };
    EXPECT_GT(ks_one_sample(v, normal_cdf).p_value, 0.01);
}

TEST(ModelReturns, FixedB0WithoutNormalization) {
    SdeParams p;
    ReturnModelParams rm{0.0, 2.0, 1e-3, false};
    auto r = generate_model_returns(p, rm, 100.0, 8);
    EXPECT_EQ(r.b0, 2.0);
    EXPECT_NEAR(sample_std(r.returns.values()), 2.0, 0.05);
}

TEST(ModelReturns, RollingStdTracksDriverWhenImpactDominates) {
    SdeParams p;
    ReturnModelParams rm{10.0, 1.0, 2e-6, true};
    auto r = generate_model_returns(p, rm, 2.0, 12);  // 1e6 samples
    const std::size_t w = 30;
    auto vol = rolling_std(r.returns, w);
    auto level = moving_average(r.driver, w);
    EXPECT_GT(pearson(vol.values(), level.values()), 0.9);
}
