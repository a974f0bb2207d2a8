#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include <json.hpp>

#include "burstlab/error.hpp"
#include "burstlab/pipeline.hpp"
#include "burstlab/report.hpp"

using namespace burstlab;
using nlohmann::json;

namespace {

PowerLawFit fit(double exponent, double se, FitMethod method = FitMethod::maximum_likelihood) {
    PowerLawFit f;
    f.exponent = exponent;
    f.std_error = se;
    f.intercept = -0.123456789012345;
    f.lo = 1e-4;
    f.hi = 0.1 / 3.0;
    f.n = 1234;
    f.method = method;
    return f;
}

PsdSummary psd_with_hurst(double hurst, double beta_se) {
    PsdSummary p;
    p.hurst = hurst;
    p.beta = 2.0 * hurst + 1.0;
    p.beta_std_error = beta_se;
    p.beta_source = "single";
    return p;
}

Report sample_report() {
    Report r;
    r.provenance.config = {{"source", "sde"}, {"seed", "7"}};
    r.provenance.seed = 18446744073709551557ULL;
    r.provenance.seed_generated = true;
    r.source = "sde";
    r.stages = {"simulate_sde", "normalize_unit_std", "extract_bursts"};
    r.anscombe_clamped = 3;
    r.series.push_back({"sde[0]", 2e-5, 2e-5, 1000000, 3.14159265358979});
    ThresholdResult t;
    t.h = 0.67;
    t.count = 42;
    t.bursts = 42;
    t.interbursts = 41;
    t.edge_censored = 2;
    t.censored_time = 1.0 / 3.0;
    t.span = 20.0;
    t.histogram = LogHistogram{{1.0, 2.0, 4.0}, {3, 0}, {0.75, 0.0}};
    t.histogram_fit = fit(1.49, 0.03, FitMethod::least_squares);
    t.mle_fit = fit(1.51, 0.02);
    t.notes = {"a note"};
    r.thresholds.push_back(t);
    ThresholdResult empty;
    empty.kind = EpisodeKind::interburst;
    empty.h = 2.5;
    empty.notes = {"no episodes"};
    r.thresholds.push_back(empty);
    r.psd.segment_len = 4096;
    r.psd.segments = 487;
    r.psd.binned = SpectrumEstimate{{0.1, 1.0}, {2.0, 0.5}, 487, true};
    r.psd.single = fit(1.01, 0.02, FitMethod::least_squares);
    TwoRegimeFit two;
    two.low = fit(1.7, 0.05, FitMethod::least_squares);
    two.high = fit(0.8, 0.04, FitMethod::least_squares);
    two.single = *r.psd.single;
    two.f_break = 1e-3;
    two.rss_two = 0.5;
    two.rss_single = 0.9;
    two.break_p_value = 0.001;
    two.break_reliable = true;
    r.psd.two_regime = two;
    r.psd.beta_source = "two_regime_low";
    r.psd.beta = 1.7;
    r.psd.beta_std_error = 0.05;
    r.psd.hurst = 0.35;
    r.psd.hurst_in_unit_interval = true;
    r.verdict = make_verdict({*t.mle_fit}, r.psd);
    return r;
}

}  // namespace

TEST(ReportJson, RoundTripIsLossless) {
    const auto r = sample_report();
    const auto text = report_to_json(r);
    const auto back = report_from_json(text);
    EXPECT_EQ(back, r);
    EXPECT_EQ(report_to_json(back), text);
    EXPECT_EQ(text.back(), '\n');
}

TEST(ReportJson, OptionalsBecomeNull) {
    const auto j = json::parse(report_to_json(sample_report()));
    EXPECT_TRUE(j["thresholds"][1]["histogram"].is_null());
    EXPECT_TRUE(j["thresholds"][1]["mle_fit"].is_null());
    EXPECT_EQ(j["schema"], "burstlab-report/1");
}

TEST(ReportJson, RejectsMissingVerdict) {
    auto j = json::parse(report_to_json(sample_report()));
    j.erase("verdict");
    EXPECT_THROW(validate_report_json(j.dump()), ValidationError);
    EXPECT_THROW(report_from_json(j.dump()), ValidationError);
}

TEST(ReportJson, ListsEveryProblem) {
    auto j = json::parse(report_to_json(sample_report()));
    j.erase("verdict");
    j["provenance"].erase("seed");
    j["thresholds"][0]["count"] = "many";
    try {
        validate_report_json(j.dump());
        FAIL() << "expected a validation error";
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("verdict"), std::string::npos);
        EXPECT_NE(msg.find("seed"), std::string::npos);
        EXPECT_NE(msg.find("count"), std::string::npos);
    }
}

TEST(ReportJson, RejectsWrongSchemaAndLabel) {
    auto j = json::parse(report_to_json(sample_report()));
    j["schema"] = "burstlab-report/0";
    EXPECT_THROW(validate_report_json(j.dump()), ValidationError);
    j = json::parse(report_to_json(sample_report()));
    j["verdict"]["label"] = "probably";
    EXPECT_THROW(validate_report_json(j.dump()), ValidationError);
    EXPECT_THROW(validate_report_json("{not json"), ValidationError);
}

TEST(Verdict, MarkovSourceIsConsistent) {
    const auto v = make_verdict({fit(1.52, 0.02), fit(1.47, 0.03)}, psd_with_hurst(0.0, 0.05));
    EXPECT_EQ(v.label, "consistent-with-3/2");
    EXPECT_EQ(v.fits_used, 2u);
    const double w1 = 1.0 / (0.02 * 0.02), w2 = 1.0 / (0.03 * 0.03);
    EXPECT_NEAR(*v.exponent, (w1 * 1.52 + w2 * 1.47) / (w1 + w2), 1e-12);
    EXPECT_NEAR(*v.exponent_std_error, 1.0 / std::sqrt(w1 + w2), 1e-12);
    EXPECT_DOUBLE_EQ(*v.fbm_exponent, 2.0);
    EXPECT_TRUE(v.markov_consistent);
    EXPECT_FALSE(v.fbm_consistent);
}

TEST(Verdict, LongMemorySourceIsInconsistent) {
    const auto v = make_verdict({fit(1.31, 0.02)}, psd_with_hurst(0.7, 0.05));
    EXPECT_EQ(v.label, "inconsistent-with-3/2");
    EXPECT_FALSE(v.markov_consistent);
    EXPECT_TRUE(v.fbm_consistent);
    EXPECT_NEAR(*v.fbm_joint_std_error, std::hypot(0.02, 0.025), 1e-12);
    EXPECT_NEAR(*v.fbm_distance, std::fabs(1.31 - 1.3) / *v.fbm_joint_std_error, 1e-12);
}

TEST(Verdict, CoincidentHypothesesAreIndeterminate) {
    EXPECT_EQ(make_verdict({fit(1.5, 0.02)}, psd_with_hurst(0.5, 0.05)).label, "indeterminate");
}

TEST(Verdict, NeitherHypothesisPicksTheCloser) {
    EXPECT_EQ(make_verdict({fit(1.7, 0.01)}, psd_with_hurst(0.0, 0.02)).label, "consistent-with-3/2");
    EXPECT_EQ(make_verdict({fit(1.2, 0.01)}, psd_with_hurst(0.7, 0.02)).label, "inconsistent-with-3/2");
}

TEST(Verdict, WithoutSpectrumUsesMarkovTestAlone) {
    EXPECT_EQ(make_verdict({fit(1.55, 0.03)}, PsdSummary{}).label, "consistent-with-3/2");
    const auto v = make_verdict({fit(1.8, 0.03)}, PsdSummary{});
    EXPECT_EQ(v.label, "inconsistent-with-3/2");
    EXPECT_FALSE(v.fbm_exponent.has_value());
}

TEST(Verdict, NoUsableFits) {
    const auto v = make_verdict({}, psd_with_hurst(0.5, 0.05));
    EXPECT_EQ(v.label, "indeterminate");
    EXPECT_EQ(v.fits_used, 0u);
    EXPECT_FALSE(v.exponent.has_value());
}

TEST(ReportJson, ChecksTwoRegimeFields) {
    auto j = json::parse(report_to_json(sample_report()));
    j["psd"]["two_regime"].erase("break_p_value");
    j["psd"]["two_regime"]["high"].erase("exponent");
    try {
        validate_report_json(j.dump());
        FAIL() << "expected a validation error";
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("psd.two_regime.break_p_value"), std::string::npos);
        EXPECT_NE(msg.find("psd.two_regime.high.exponent"), std::string::npos);
    }
}
