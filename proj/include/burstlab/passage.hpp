#pragma once

// Threshold passage analysis. For a threshold h a burst is a maximal run of
// samples strictly above h and an inter-burst a maximal run at or below h.
// Runs touching either end of the series are censored (their true length is
// unknown), counted, and excluded from the duration samples.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "burstlab/series.hpp"

namespace burstlab {

enum class EpisodeKind { burst, interburst };

const char* to_string(EpisodeKind kind) noexcept;
EpisodeKind episode_kind_from_string(const std::string& name);

enum class DurationConvention {
    sample_count,  // run length * dt
    interpolated,  // linearly interpolated crossing to crossing
};

struct Episode {
    EpisodeKind kind;
    double start;         // time of the first sample (or interpolated crossing)
    double end;           // start + duration
    double duration;
    std::size_t samples;  // run length in samples
};

struct BurstSet {
    double threshold = 0.0;
    double dt = 1.0;
    DurationConvention convention = DurationConvention::sample_count;
    std::vector<Episode> episodes;  // time ordered, bursts and inter-bursts interleaved
    double span = 0.0;              // size * dt
    std::size_t edge_censored = 0;  // discarded boundary runs
    std::size_t censored_samples = 0;

    std::vector<double> durations(EpisodeKind kind) const;
    std::size_t count(EpisodeKind kind) const;
    double censored_time() const noexcept { return static_cast<double>(censored_samples) * dt; }
};

BurstSet extract_bursts(const UniformSeries& series, double threshold,
                        DurationConvention convention = DurationConvention::sample_count);

/// Durations of one kind from one source, labelled for reporting.
struct DurationSample {
    std::string label;
    EpisodeKind kind;
    std::vector<double> values;
};

DurationSample durations_of(const BurstSet& set, EpisodeKind kind, std::string label);

struct PooledDurations {
    EpisodeKind kind;
    std::vector<double> values;
    std::vector<std::size_t> source;  // index into labels, parallel to values
    std::vector<std::string> labels;
};

/// Concatenates samples of the same kind; mixing kinds is an error.
PooledDurations pool_durations(std::span<const DurationSample> samples);

}  // namespace burstlab
