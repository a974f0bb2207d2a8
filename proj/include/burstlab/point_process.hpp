#pragma once

// Quasi-Poisson trade arrivals driven by a slowly varying rate n(t) = 1/tau(t),
// and recovery of that rate from event timestamps:
//
//   events -> counts per bin -> Anscombe 2 sqrt(x + 3/8)
//          -> moving average -> exact unbiased inverse Anscombe
//
// Waiting times are exponential with density (1/tau) exp(-tau_p / tau).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "burstlab/series.hpp"

namespace burstlab {

struct PoissonPipelineConfig {
    double bin_seconds = 60.0;
    std::size_t ma_window = 10;

    void validate() const;
};

/// Inhomogeneous Poisson process with rate (events per second) held constant
/// over each rate sample [t0 + i dt, t0 + (i+1) dt). Unused exponential
/// "hazard" carries across interval boundaries, which rescales the leftover
/// waiting time by the ratio of the rates.
EventStream generate_events(const UniformSeries& rate, std::uint64_t seed);

/// Maps a positive driver x(t) onto a rate series for generate_events: each
/// driver sample becomes one bin of `bin_seconds` with expected count
/// counts_per_unit * x.
UniformSeries rate_from_driver(const UniformSeries& driver, double counts_per_unit, double bin_seconds,
                               double t0 = 0.0);

/// Event counts in half-open bins [t_start + i bin, t_start + (i+1) bin)
/// covering [t_start, t_end); events at or after t_end are ignored.
UniformSeries bin_counts(const EventStream& events, double bin_seconds, double t_start, double t_end);

/// A(x) = 2 sqrt(x + 3/8).
UniformSeries anscombe_forward(const UniformSeries& counts);

struct InverseAnscombe {
    UniformSeries values;
    std::size_t clamped = 0;  // inputs below the transform's range, mapped to 0
};

/// Lower end of the forward transform's range, A(0) = 2 sqrt(3/8).
inline constexpr double kAnscombeFloor = 1.2247448713915890491;
/// Inputs within this distance of kAnscombeFloor are rounding, not data; they
/// map to 0 and are not counted as clamped.
inline constexpr double kAnscombeClampEpsilon = 1e-9;

/// Closed-form approximation of the exact unbiased inverse
///   x(D) = D^2/4 + sqrt(3/2)/4 D^-1 - 11/8 D^-2 + 5 sqrt(3/2)/8 D^-3 - 1/8,
/// clamped at 0 for D at or below A(0).
InverseAnscombe anscombe_inverse_unbiased(const UniformSeries& transformed);

/// Naive algebraic inverse (D/2)^2 - 3/8, kept for bias comparisons.
double anscombe_inverse_algebraic(double transformed);

struct DenoisedActivity {
    UniformSeries activity;           // recovered counts per bin
    std::size_t clamped = 0;
    std::vector<std::string> stages;  // execution trace, in order
};

/// Binning window for denoise_activity. Defaults (nullopt) align to whole
/// bins of absolute time around the first and last event.
struct ActivityWindow {
    std::optional<double> t_start;
    std::optional<double> t_end;
};

DenoisedActivity denoise_activity(const EventStream& events, const PoissonPipelineConfig& config,
                                  const ActivityWindow& window = {});

}  // namespace burstlab
