#pragma once

// Analysis report, schema "burstlab-report/1". Every number in it is produced
// by a library operation on the configured input; the JSON form is lossless.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "burstlab/histogram.hpp"
#include "burstlab/passage.hpp"
#include "burstlab/spectral.hpp"

namespace burstlab {

inline constexpr const char* kReportSchema = "burstlab-report/1";
inline constexpr const char* kBuildId = "burstlab-0.1.0";

struct Provenance {
    std::map<std::string, std::string> config;
    std::uint64_t seed = 0;
    bool seed_generated = false;
    std::string build_id = kBuildId;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct SeriesSummary {
    std::string label;
    double t0 = 0.0;
    double dt = 1.0;
    std::size_t samples = 0;
    double scale = 1.0;  // divisor applied by normalization (1 when disabled)

    friend bool operator==(const SeriesSummary&, const SeriesSummary&) = default;
};

struct ThresholdResult {
    double h = 0.0;
    EpisodeKind kind = EpisodeKind::burst;
    std::size_t count = 0;  // pooled durations of `kind`
    std::size_t bursts = 0;
    std::size_t interbursts = 0;
    std::size_t edge_censored = 0;
    double censored_time = 0.0;
    double span = 0.0;
    std::optional<LogHistogram> histogram;
    std::optional<PowerLawFit> histogram_fit;
    std::optional<PowerLawFit> mle_fit;
    std::vector<std::string> notes;

    friend bool operator==(const ThresholdResult&, const ThresholdResult&) = default;
};

struct PsdSummary {
    std::size_t segment_len = 0;
    std::size_t segments = 0;
    std::optional<SpectrumEstimate> binned;
    std::optional<PowerLawFit> single;
    std::optional<TwoRegimeFit> two_regime;
    std::string beta_source;  // "single" or "two_regime_low"
    std::optional<double> beta;
    std::optional<double> beta_std_error;
    std::optional<double> hurst;
    bool hurst_in_unit_interval = false;
    std::vector<std::string> notes;

    friend bool operator==(const PsdSummary&, const PsdSummary&) = default;
};

/// Compares the pooled duration exponent with the Markov value 3/2 and with
/// the fractional Brownian motion value 2 - H, H taken from the spectrum.
struct Verdict {
    std::string label;  // consistent-with-3/2 | inconsistent-with-3/2 | indeterminate
    std::size_t fits_used = 0;
    std::optional<double> exponent;          // inverse-variance mean of the likelihood fits
    std::optional<double> exponent_std_error;
    std::optional<double> markov_distance;   // |exponent - 1.5| / std error
    std::optional<double> fbm_exponent;      // 2 - H_psd
    std::optional<double> fbm_joint_std_error;
    std::optional<double> fbm_distance;      // |exponent - (2 - H)| / joint std error
    bool markov_consistent = false;
    bool fbm_consistent = false;

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct Report {
    std::string schema = kReportSchema;
    Provenance provenance;
    std::string source;
    std::vector<std::string> stages;  // execution trace of the first pooled series
    std::size_t anscombe_clamped = 0;
    std::vector<SeriesSummary> series;
    std::vector<ThresholdResult> thresholds;
    PsdSummary psd;
    Verdict verdict;

    friend bool operator==(const Report&, const Report&) = default;
};

/// Pretty-printed JSON, newline terminated. Byte-identical for equal reports.
std::string report_to_json(const Report& report);

/// Validates against the schema, then parses. Throws ValidationError.
Report report_from_json(const std::string& text);

/// Schema check only; throws ValidationError naming every problem found.
void validate_report_json(const std::string& text);

}  // namespace burstlab
