#pragma once

// Power spectral density estimation and power-law fitting.
//
// Sign conventions: a spectrum S(f) ~ f^-beta is reported with beta > 0, and a
// duration density p(T) ~ T^-alpha with alpha > 0. Fitted lines use decimal
// logarithms: log10 y = intercept - exponent * log10 x.

#include <cstddef>
#include <span>
#include <vector>

#include "burstlab/histogram.hpp"
#include "burstlab/series.hpp"

namespace burstlab {

struct SpectrumEstimate {
    std::vector<double> frequencies;  // Hz, increasing, in (0, Nyquist]
    std::vector<double> power;        // one-sided density, units^2 / Hz
    std::size_t segments_used = 0;
    bool log_binned = false;

    friend bool operator==(const SpectrumEstimate&, const SpectrumEstimate&) = default;
};

/// Welch estimate: Hann-windowed periodograms of mean-removed segments of
/// `segment_len` samples, overlapping by `overlap_fraction`, averaged. The
/// normalization makes the sum of power * df approximate the variance. The
/// zero-frequency bin is dropped.
SpectrumEstimate welch_psd(const UniformSeries& series, std::size_t segment_len, double overlap_fraction = 0.5);

/// Averages power inside logarithmic frequency bins. Each output point sits at
/// the geometric mean of its member frequencies; empty bins are dropped.
SpectrumEstimate log_bin_spectrum(const SpectrumEstimate& spectrum, int bins_per_decade = 10);

/// Segment-weighted average of estimates that share one frequency grid.
SpectrumEstimate merge_spectra(std::span<const SpectrumEstimate> spectra);

enum class FitMethod { least_squares, maximum_likelihood };

struct PowerLawFit {
    double exponent = 0.0;   // positive for decaying laws
    double intercept = 0.0;  // log10 y at x = 1
    double lo = 0.0;         // fit range actually used
    double hi = 0.0;
    double std_error = 0.0;  // standard error of the exponent
    double r2 = 0.0;         // least squares only
    std::size_t n = 0;       // points (least squares) or samples (likelihood)
    FitMethod method = FitMethod::least_squares;

    friend bool operator==(const PowerLawFit&, const PowerLawFit&) = default;
};

/// Least squares of log10 y on log10 x over points with lo <= x <= hi and
/// y > 0. At least five such points are required.
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y, double lo, double hi);
PowerLawFit fit_power_law(const SpectrumEstimate& spectrum, double lo, double hi);
/// Uses geometric bin centers. The first bin of the histogram is skipped by
/// default: its lower edge is the sample minimum, which biases its density.
PowerLawFit fit_power_law(const LogHistogram& histogram, double lo, double hi, bool skip_first_bin = true);

inline constexpr double kBreakSignificance = 0.01;

struct TwoRegimeFit {
    PowerLawFit low;   // beta_1, below the break
    PowerLawFit high;  // beta_2, at and above the break
    PowerLawFit single;
    double f_break = 0.0;
    double rss_two = 0.0;
    double rss_single = 0.0;
    /// Monte Carlo p-value of the best break against a single line, from the
    /// largest F statistic over the candidate breaks.
    double break_p_value = 1.0;
    /// True when break_p_value < kBreakSignificance and the two exponents
    /// differ by at least max(2 joint standard errors, 0.05).
    bool break_reliable = false;

    friend bool operator==(const TwoRegimeFit&, const TwoRegimeFit&) = default;
};

/// Log-spaced candidate breaks strictly inside the spectrum, leaving at least
/// `min_points` spectrum points on either side.
std::vector<double> break_search_grid(const SpectrumEstimate& spectrum, int per_decade = 20,
                                      std::size_t min_points = 5);

/// Independent log-log lines below and above each candidate break; the break
/// with the smallest total squared residual wins. Candidates leaving fewer
/// than five points on either side are skipped. Requires a spectrum spanning
/// at least three decades and a grid with at least one usable candidate.
TwoRegimeFit fit_two_regime_psd(const SpectrumEstimate& spectrum, std::span<const double> break_grid);
TwoRegimeFit fit_two_regime_psd(const SpectrumEstimate& spectrum);

struct HurstEstimate {
    double hurst;
    bool in_unit_interval;  // 0 < H < 1
};

/// H = (beta - 1) / 2.
HurstEstimate hurst_from_beta(double beta);

/// Maximum-likelihood exponent of a continuous power law truncated to
/// [lo, hi], using the durations inside that range (at least 100). The
/// standard error comes from the Fisher information.
PowerLawFit fit_duration_exponent_mle(std::span<const double> durations, double lo, double hi);

}  // namespace burstlab
