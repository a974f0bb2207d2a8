#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "burstlab/error.hpp"
#include "burstlab/fbm.hpp"
#include "burstlab/histogram.hpp"
#include "burstlab/spectral.hpp"
#include "oracles.hpp"

using namespace burstlab;

namespace {

UniformSeries white_noise(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> g;
    std::vector<double> v(n);
    for (double& x : v) x = g(eng);
    return {0.0, 1.0, std::move(v)};
}

// Continuous two-slope spectrum on a log grid, optionally with the
// multiplicative scatter of an average of `segments` periodograms.
SpectrumEstimate piecewise_spectrum(double beta1, double beta2, double f_break, std::size_t segments,
                                    std::uint64_t seed) {
    SpectrumEstimate s;
    s.log_binned = true;
    s.segments_used = segments;
    std::mt19937_64 eng(seed);
    std::gamma_distribution<double> scatter(static_cast<double>(segments), 1.0 / static_cast<double>(segments));
    for (int k = 0; k <= 80; ++k) {
        const double f = std::pow(10.0, -5.0 + k / 20.0);
        const double p = f < f_break ? std::pow(f / f_break, -beta1) : std::pow(f / f_break, -beta2);
        s.frequencies.push_back(f);
        s.power.push_back(segments ? p * scatter(eng) : p);
    }
    return s;
}

double full_range_slope(const SpectrumEstimate& s) {
    return fit_power_law(s, s.frequencies.front(), s.frequencies.back()).exponent;
}

}  // namespace

TEST(WelchPsd, SinePeakInContainingBin) {
    const double f0 = 0.1;
    std::vector<double> v(1 << 14);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(2.0 * std::numbers::pi * f0 * static_cast<double>(i));
    const auto s = welch_psd(UniformSeries(0.0, 1.0, v), 256);
    const auto peak = std::max_element(s.power.begin(), s.power.end()) - s.power.begin();
    const double df = 1.0 / 256.0;
    EXPECT_LE(std::fabs(s.frequencies[static_cast<std::size_t>(peak)] - f0), 0.5 * df);
}

TEST(WelchPsd, GridAndSegments) {
    const auto s = welch_psd(white_noise(4096, 1), 1024);
    EXPECT_EQ(s.segments_used, 7u);
    ASSERT_EQ(s.frequencies.size(), 512u);
    EXPECT_DOUBLE_EQ(s.frequencies.front(), 1.0 / 1024.0);
    EXPECT_DOUBLE_EQ(s.frequencies.back(), 0.5);
    EXPECT_FALSE(s.log_binned);
    EXPECT_THROW(welch_psd(white_noise(100, 1), 8), ValidationError);
    EXPECT_THROW(welch_psd(white_noise(100, 1), 128), ValidationError);
}

TEST(WelchPsd, MatchesDirectPeriodogramOnOneSegment) {
    // With a single segment the estimate is the Hann-windowed periodogram.
    const std::size_t n = 64;
    const auto x = white_noise(n, 5);
    const auto s = welch_psd(x, n);
    ASSERT_EQ(s.segments_used, 1u);
    std::vector<double> w(n), y(n);
    double mean = 0.0, w2 = 0.0;
    for (double v : x.values()) mean += v / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n)));
        y[i] = (x[i] - mean) * w[i];
        w2 += w[i] * w[i];
    }
    for (std::size_t k = 1; k < n / 2; ++k) {
        EXPECT_NEAR(s.power[k - 1], 2.0 * oracle::dft_power(y, k) / w2, 1e-10) << k;
    }
    EXPECT_NEAR(s.power.back(), oracle::dft_power(y, n / 2) / w2, 1e-10);
}

TEST(WelchPsd, WhiteNoiseIsFlat) {
    const auto s = log_bin_spectrum(welch_psd(white_noise(1000000, 2), 1 << 12), 10);
    const double lo = s.frequencies.back() / 100.0;
    EXPECT_NEAR(fit_power_law(s, lo, s.frequencies.back()).exponent, 0.0, 0.05);
}

TEST(WelchPsd, TotalPowerMatchesVariance) {
    for (double scale : {1.0, 3.0}) {
        auto x = white_noise(1 << 18, 3);
        std::vector<double> v(x.values().begin(), x.values().end());
        for (double& e : v) e *= scale;
        const auto s = welch_psd(UniformSeries(0.0, 0.5, v), 1024);
        double total = 0.0;
        const double df = s.frequencies[1] - s.frequencies[0];
        for (double p : s.power) total += p * df;
        EXPECT_NEAR(total / (scale * scale), 1.0, 0.02);
    }
}

TEST(WelchPsd, FractionalBrownianSlopes) {
    for (double h : {0.3, 0.5, 0.7}) {
        const auto path = simulate_fbm(FbmParams{h, 1 << 20, 1.0, 1.0}, 40).series;
        const auto s = log_bin_spectrum(welch_psd(path, 1 << 14), 10);
        EXPECT_NEAR(full_range_slope(s), 2.0 * h + 1.0, 0.15) << "H " << h;
    }
}

TEST(LogBinSpectrum, GeometricMeanPositions) {
    SpectrumEstimate s;
    for (int k = 1; k <= 1000; ++k) {
        s.frequencies.push_back(k * 0.001);
        s.power.push_back(std::pow(k * 0.001, -2.0));
    }
    s.segments_used = 3;
    const auto b = log_bin_spectrum(s, 10);
    EXPECT_TRUE(b.log_binned);
    EXPECT_EQ(b.segments_used, 3u);
    EXPECT_LT(b.frequencies.size(), 35u);
    for (std::size_t i = 1; i < b.frequencies.size(); ++i) EXPECT_GT(b.frequencies[i], b.frequencies[i - 1]);
    EXPECT_NEAR(full_range_slope(b), 2.0, 0.02);
}

TEST(MergeSpectra, WeightsBySegments) {
    SpectrumEstimate a{{1.0, 2.0}, {1.0, 1.0}, 1, false};
    SpectrumEstimate b{{1.0, 2.0}, {4.0, 7.0}, 3, false};
    const std::vector<SpectrumEstimate> both = {a, b};
    const auto m = merge_spectra(both);
    EXPECT_EQ(m.segments_used, 4u);
    EXPECT_DOUBLE_EQ(m.power[0], 13.0 / 4.0);
    EXPECT_DOUBLE_EQ(m.power[1], 22.0 / 4.0);
    SpectrumEstimate c{{1.0, 3.0}, {1.0, 1.0}, 1, false};
    const std::vector<SpectrumEstimate> bad = {a, c};
    EXPECT_THROW(merge_spectra(bad), ValidationError);
}

TEST(FitPowerLaw, ExactSyntheticSpectrum) {
    std::vector<double> f, p;
    for (int k = 0; k < 40; ++k) {
        f.push_back(std::pow(10.0, -3.0 + k * 0.1));
        p.push_back(5.0 * std::pow(f.back(), -1.7));
    }
    const auto fit = fit_power_law(f, p, 1e-3, 10.0);
    EXPECT_NEAR(fit.exponent, 1.7, 1e-6);
    EXPECT_NEAR(fit.intercept, std::log10(5.0), 1e-9);
    EXPECT_NEAR(fit.r2, 1.0, 1e-12);
    EXPECT_NEAR(fit.std_error, 0.0, 1e-9);
    EXPECT_EQ(fit.method, FitMethod::least_squares);
}

TEST(FitPowerLaw, ExactParetoDensity) {
    std::vector<double> x, y;
    for (int k = 0; k < 30; ++k) {
        x.push_back(std::pow(10.0, k * 0.1));
        y.push_back(0.5 * std::pow(x.back(), -1.5));
    }
    EXPECT_NEAR(fit_power_law(x, y, 1.0, 1e3).exponent, 1.5, 1e-9);
}

TEST(FitPowerLaw, RangeRestrictsPoints) {
    std::vector<double> x, y;
    for (int k = 1; k <= 100; ++k) {
        x.push_back(k);
        y.push_back(k < 50 ? std::pow(k, -1.0) : 1e3 * std::pow(k, -3.0));
    }
    const auto fit = fit_power_law(x, y, 1.0, 40.0);
    EXPECT_NEAR(fit.exponent, 1.0, 1e-9);
    EXPECT_EQ(fit.n, 40u);
    EXPECT_DOUBLE_EQ(fit.lo, 1.0);
    EXPECT_DOUBLE_EQ(fit.hi, 40.0);
}

TEST(FitPowerLaw, NeedsFivePositivePoints) {
    const std::vector<double> x = {1, 2, 3, 4, 5, 6};
    const std::vector<double> y = {1, 0, 1, 1, 1, 0};
    EXPECT_THROW(fit_power_law(x, y, 1.0, 6.0), ValidationError);
    EXPECT_THROW(fit_power_law(x, y, 3.0, 2.0), ValidationError);
}

TEST(FitPowerLaw, AgreesWithOlsOracle) {
    std::mt19937_64 eng(9);
    std::normal_distribution<double> g(0.0, 0.2);
    std::vector<double> x, y, lx, ly;
    for (int k = 0; k < 60; ++k) {
        x.push_back(std::pow(10.0, k * 0.05));
        y.push_back(std::pow(x.back(), -0.9) * std::exp(g(eng)));
        lx.push_back(std::log10(x.back()));
        ly.push_back(std::log10(y.back()));
    }
    EXPECT_NEAR(fit_power_law(x, y, 1.0, 1e3).exponent, -oracle::ols_slope(lx, ly), 1e-12);
}

TEST(TwoRegime, RecoversFirstPairNoiseless) {
    const auto s = piecewise_spectrum(1.7, 0.8, 1e-3, 0, 0);
    const auto fit = fit_two_regime_psd(s);
    EXPECT_NEAR(fit.low.exponent, 1.7, 0.05);
    EXPECT_NEAR(fit.high.exponent, 0.8, 0.05);
    EXPECT_NEAR(std::log10(fit.f_break), -3.0, 1.0 / 20.0 + 1e-9);
    EXPECT_TRUE(fit.break_reliable);
}

TEST(TwoRegime, RecoversBothPairsWithScatter) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        for (const auto& [b1, b2] : {std::pair{1.7, 0.8}, std::pair{1.4, 0.5}}) {
            const auto fit = fit_two_regime_psd(piecewise_spectrum(b1, b2, 1e-3, 64, seed));
            EXPECT_NEAR(fit.low.exponent, b1, 0.05) << seed;
            EXPECT_NEAR(fit.high.exponent, b2, 0.05) << seed;
            EXPECT_TRUE(fit.break_reliable);
        }
    }
}

TEST(TwoRegime, SingleRegimeBreakIsUnreliable) {
    const auto exact = fit_two_regime_psd(piecewise_spectrum(0.9, 0.9, 1e-3, 0, 0));
    EXPECT_FALSE(exact.break_reliable);
    EXPECT_NEAR(exact.low.exponent, exact.high.exponent, 1e-9);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto fit = fit_two_regime_psd(piecewise_spectrum(0.9, 0.9, 1e-3, 64, seed));
        EXPECT_GT(fit.break_p_value, kBreakSignificance) << seed;
        EXPECT_FALSE(fit.break_reliable) << seed;
    }
}

TEST(TwoRegime, NestedResidualNeverExceedsSingle) {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto s = piecewise_spectrum(1.0 + 0.02 * static_cast<double>(seed), 0.7, 1e-2, 4, seed);
        const auto fit = fit_two_regime_psd(s);
        EXPECT_LE(fit.rss_two, fit.rss_single * (1.0 + 1e-12));
    }
}

TEST(TwoRegime, Preconditions) {
    auto narrow = piecewise_spectrum(1.0, 1.0, 1e-3, 0, 0);
    narrow.frequencies.resize(50);  // 2.45 decades
    narrow.power.resize(50);
    EXPECT_THROW(fit_two_regime_psd(narrow), ValidationError);
    const auto s = piecewise_spectrum(1.0, 1.0, 1e-3, 0, 0);
    EXPECT_THROW(fit_two_regime_psd(s, std::vector<double>{}), ValidationError);
    EXPECT_THROW(fit_two_regime_psd(s, std::vector<double>{1e-5}), ValidationError);
}

TEST(HurstFromBeta, Examples) {
    EXPECT_NEAR(hurst_from_beta(1.7).hurst, 0.35, 1e-15);
    EXPECT_NEAR(hurst_from_beta(1.4).hurst, 0.2, 1e-15);
    EXPECT_DOUBLE_EQ(hurst_from_beta(2.0).hurst, 0.5);
    EXPECT_TRUE(hurst_from_beta(2.0).in_unit_interval);
    EXPECT_FALSE(hurst_from_beta(0.9).in_unit_interval);
    EXPECT_FALSE(hurst_from_beta(3.2).in_unit_interval);
}

TEST(DurationMle, RecoversTruncatedPareto) {
    int within = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto x = oracle::truncated_pareto(1.5, 1.0, 1e3, 20000, seed);
        const auto fit = fit_duration_exponent_mle(x, 1.0, 1e3);
        EXPECT_EQ(fit.method, FitMethod::maximum_likelihood);
        EXPECT_EQ(fit.n, 20000u);
        within += std::fabs(fit.exponent - 1.5) < 2.0 * fit.std_error ? 1 : 0;
    }
    EXPECT_GE(within, 16);
}

TEST(DurationMle, StandardErrorMatchesSpread) {
    std::vector<double> est;
    double reported = 0.0;
    for (std::uint64_t seed = 100; seed < 300; ++seed) {
        const auto fit = fit_duration_exponent_mle(oracle::truncated_pareto(1.3, 2.0, 200.0, 2000, seed), 2.0, 200.0);
        est.push_back(fit.exponent);
        reported += fit.std_error / 200.0;
    }
    double m = 0.0, v = 0.0;
    for (double e : est) m += e / est.size();
    for (double e : est) v += (e - m) * (e - m) / (est.size() - 1);
    EXPECT_NEAR(std::sqrt(v) / reported, 1.0, 0.15);
    EXPECT_NEAR(m, 1.3, 0.01);
}

TEST(DurationMle, DistinguishesNeighbouringExponents) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto fit = fit_duration_exponent_mle(oracle::truncated_pareto(1.65, 1.0, 1e3, 10000, seed), 1.0, 1e3);
        EXPECT_GT(std::fabs(fit.exponent - 1.5) / fit.std_error, 2.576) << seed;
    }
}

TEST(DurationMle, AgreesWithHistogramSlope) {
    for (double alpha : {1.3, 1.5, 1.8}) {
        const auto x = oracle::truncated_pareto(alpha, 1.0, 1e3, 200000, 7);
        const auto mle = fit_duration_exponent_mle(x, 1.0, 1e3);
        const auto hist = fit_power_law(log_histogram(x, 1.0, 1e3, 8), 1.0, 1e3, false);
        EXPECT_LT(std::fabs(mle.exponent - hist.exponent), 2.0 * std::hypot(mle.std_error, hist.std_error)) << alpha;
    }
}

TEST(DurationMle, NormalizationIntercept) {
    const auto fit = fit_duration_exponent_mle(oracle::truncated_pareto(2.0, 1.0, 10.0, 5000, 3), 1.0, 10.0);
    const double s = 1.0 - fit.exponent;
    EXPECT_NEAR(fit.intercept, std::log10(s / (std::pow(10.0, s) - 1.0)), 1e-12);
}

TEST(DurationMle, Preconditions) {
    const auto x = oracle::truncated_pareto(1.5, 1.0, 10.0, 500, 1);
    EXPECT_THROW(fit_duration_exponent_mle(x, 1.0, 1.0 + 1e-6), ValidationError);
    EXPECT_THROW(fit_duration_exponent_mle(x, 0.0, 10.0), ValidationError);
    EXPECT_THROW(fit_duration_exponent_mle(std::vector<double>(99, 2.0), 1.0, 10.0), ValidationError);
}
