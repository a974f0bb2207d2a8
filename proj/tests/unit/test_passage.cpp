#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "burstlab/error.hpp"
#include "burstlab/fbm.hpp"
#include "burstlab/histogram.hpp"
#include "burstlab/passage.hpp"
#include "burstlab/sde.hpp"
#include "burstlab/spectral.hpp"
#include "burstlab/stats.hpp"
#include "oracles.hpp"

using namespace burstlab;

namespace {

double total(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

UniformSeries gaussian_series(std::size_t n, std::uint64_t seed, double dt = 1.0) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> g;
    std::vector<double> v(n);
    for (double& x : v) x = g(eng);
    return {0.0, dt, std::move(v)};
}

double burst_mle(const UniformSeries& x, double h) {
    const auto set = extract_bursts(x, h);
    return fit_duration_exponent_mle(set.durations(EpisodeKind::burst), 10.0 * x.dt(), 1000.0 * x.dt()).exponent;
}

}  // namespace

TEST(ExtractBursts, HandExample) {
    const auto set = extract_bursts(UniformSeries(0.0, 1.0, {0, 2, 2, 0, 0, 2, 0}), 1.0);
    EXPECT_EQ(set.durations(EpisodeKind::burst), (std::vector<double>{2.0, 1.0}));
    EXPECT_EQ(set.durations(EpisodeKind::interburst), (std::vector<double>{2.0}));
    EXPECT_EQ(set.edge_censored, 2u);
    EXPECT_EQ(set.censored_samples, 2u);
    ASSERT_EQ(set.episodes.size(), 3u);
    EXPECT_EQ(set.episodes[0].start, 1.0);
    EXPECT_EQ(set.episodes[0].end, 3.0);
    EXPECT_EQ(set.episodes[1].kind, EpisodeKind::interburst);
    EXPECT_EQ(set.episodes[2].samples, 1u);
}

TEST(ExtractBursts, EqualityCountsAsBelow) {
    const auto set = extract_bursts(UniformSeries(0.0, 1.0, {0, 1, 2, 1, 0, 3, 0}), 1.0);
    EXPECT_EQ(set.durations(EpisodeKind::burst), (std::vector<double>{1.0, 1.0}));
    EXPECT_EQ(set.durations(EpisodeKind::interburst), (std::vector<double>{2.0}));
}

TEST(ExtractBursts, NoCrossingIsFullyCensored) {
    const auto set = extract_bursts(UniformSeries(0.0, 0.5, {3, 4, 5, 6}), 1.0);
    EXPECT_TRUE(set.episodes.empty());
    EXPECT_EQ(set.edge_censored, 1u);
    EXPECT_EQ(set.censored_time(), set.span);
}

TEST(ExtractBursts, InterpolatedCrossings) {
    const auto set = extract_bursts(UniformSeries(0.0, 1.0, {0, 2, 2, 0, 0, 2, 0}), 1.0,
                                    DurationConvention::interpolated);
    ASSERT_EQ(set.episodes.size(), 3u);
    EXPECT_DOUBLE_EQ(set.episodes[0].start, 0.5);
    EXPECT_DOUBLE_EQ(set.episodes[0].duration, 2.0);
    EXPECT_DOUBLE_EQ(set.episodes[1].duration, 2.0);
    EXPECT_DOUBLE_EQ(set.episodes[2].start, 4.5);
    EXPECT_DOUBLE_EQ(set.episodes[2].duration, 1.0);

    const auto skewed = extract_bursts(UniformSeries(0.0, 1.0, {0, 4, 0, 0}), 1.0, DurationConvention::interpolated);
    ASSERT_EQ(skewed.episodes.size(), 1u);
    EXPECT_DOUBLE_EQ(skewed.episodes[0].start, 0.25);
    EXPECT_DOUBLE_EQ(skewed.episodes[0].duration, 1.5);
}

TEST(ExtractBursts, RejectsNonFiniteThreshold) {
    EXPECT_THROW(extract_bursts(UniformSeries(0.0, 1.0, {0, 1}), NAN), ValidationError);
}

TEST(ExtractBursts, MatchesRunOracle) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto x = gaussian_series(5000, seed);
        const std::vector<double> v(x.values().begin(), x.values().end());
        for (double h : {-0.5, 0.0, 1.2}) {
            const auto set = extract_bursts(x, h);
            std::vector<double> expected_bursts, expected_gaps;
            for (auto len : oracle::interior_runs(v, h, true)) expected_bursts.push_back(static_cast<double>(len));
            for (auto len : oracle::interior_runs(v, h, false)) expected_gaps.push_back(static_cast<double>(len));
            EXPECT_EQ(set.durations(EpisodeKind::burst), expected_bursts);
            EXPECT_EQ(set.durations(EpisodeKind::interburst), expected_gaps);
        }
    }
}

TEST(ExtractBursts, DurationsTileTheSpan) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const double dt = 0.25;
        const auto x = gaussian_series(1000 + 37 * seed, seed, dt);
        for (double h : {-1.0, 0.0, 0.3, 2.0}) {
            const auto set = extract_bursts(x, h);
            std::size_t samples = set.censored_samples;
            for (const auto& e : set.episodes) {
                EXPECT_GT(e.duration, 0.0);
                samples += e.samples;
            }
            EXPECT_EQ(samples, x.size());
            const double sum = total(set.durations(EpisodeKind::burst)) + total(set.durations(EpisodeKind::interburst)) +
                               set.censored_time();
            EXPECT_DOUBLE_EQ(sum, set.span);
        }
    }
}

TEST(ExtractBursts, ThresholdDuality) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto x = gaussian_series(3000, seed);
        std::vector<double> neg;
        for (double v : x.values()) neg.push_back(-v);
        const UniformSeries y(x.t0(), x.dt(), neg);
        for (double h : {-0.7, 0.0, 0.4}) {
            EXPECT_EQ(extract_bursts(x, h).durations(EpisodeKind::burst),
                      extract_bursts(y, -h).durations(EpisodeKind::interburst));
            EXPECT_EQ(extract_bursts(x, h).durations(EpisodeKind::interburst),
                      extract_bursts(y, -h).durations(EpisodeKind::burst));
        }
    }
}

TEST(ExtractBursts, WienerPathReturnsHaveMarkovExponent) {
    const auto path = simulate_fbm(FbmParams{0.5, 1 << 22, 1.0, 1.0}, 21).series;
    const auto set = extract_bursts(path, 0.0);
    const auto hist = duration_histogram(set.durations(EpisodeKind::burst), 8);
    const auto fit = fit_power_law(hist, 10.0, 4e4);
    EXPECT_GE(std::log10(fit.hi / fit.lo), 1.5);
    EXPECT_NEAR(fit.exponent, 1.5, 0.1);
}

TEST(ExtractBursts, SdeBurstsHaveMarkovExponent) {
    const auto raw = simulate_sde(SdeParams{}, 40.0, 2e-5, 22);
    const auto x = normalize_unit_std(raw).series;
    EXPECT_NEAR(burst_mle(x, 0.67), 1.5, 0.1);
}

TEST(PoolDurations, SelfPoolDoublesCountsAndKeepsSums) {
    const auto set = extract_bursts(gaussian_series(2000, 3), 0.2);
    const auto one = durations_of(set, EpisodeKind::burst, "a");
    const std::vector<DurationSample> twice = {one, durations_of(set, EpisodeKind::burst, "b")};
    const auto pooled = pool_durations(twice);
    EXPECT_EQ(pooled.values.size(), 2 * one.values.size());
    EXPECT_DOUBLE_EQ(total(pooled.values), 2.0 * total(one.values));
    EXPECT_EQ(pooled.labels, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(pooled.source.front(), 0u);
    EXPECT_EQ(pooled.source.back(), 1u);
    const auto h_one = duration_histogram(one.values);
    const auto h_two = duration_histogram(pooled.values);
    for (std::size_t k = 0; k < h_one.bins(); ++k) EXPECT_EQ(h_two.counts[k], 2 * h_one.counts[k]);
}

TEST(PoolDurations, RejectsMixedKinds) {
    const auto set = extract_bursts(gaussian_series(2000, 3), 0.2);
    const std::vector<DurationSample> mixed = {durations_of(set, EpisodeKind::burst, "a"),
                                               durations_of(set, EpisodeKind::interburst, "a")};
    EXPECT_THROW(pool_durations(mixed), ValidationError);
    EXPECT_THROW(pool_durations({}), ValidationError);
}

TEST(PoolDurations, PoolingFiveRunsShrinksSlopeVariance) {
    const int reps = 40;
    const double h = 0.67;
    const auto normalized = [](std::uint64_t seed) {
        return normalize_unit_std(simulate_sde(SdeParams{}, 10.0, 2e-5, seed)).series;
    };
    std::vector<double> single, pooled;
    for (int r = 0; r < reps; ++r) {
        const auto base = static_cast<std::uint64_t>(1000 + 10 * r);
        single.push_back(burst_mle(normalized(base + 9), h));
        std::vector<DurationSample> members;
        for (std::uint64_t k = 0; k < 5; ++k) {
            members.push_back(durations_of(extract_bursts(normalized(base + k), h), EpisodeKind::burst, "m"));
        }
        const auto pool = pool_durations(members);
        pooled.push_back(fit_duration_exponent_mle(pool.values, 10.0 * 2e-5, 1000.0 * 2e-5).exponent);
    }
    const double ratio = sample_variance(single) / sample_variance(pooled);
    EXPECT_GT(ratio, 2.5);
    EXPECT_LT(ratio, 10.0);
}
