#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace burstlab {

/// Logarithmically binned density estimate. Bin k covers [edges[k], edges[k+1]);
/// the last bin is closed on the right. density = count / (N * width), where
/// N counts only the values that fell inside the binned range.
struct LogHistogram {
    std::vector<double> edges;
    std::vector<std::size_t> counts;
    std::vector<double> density;

    std::size_t bins() const noexcept { return counts.size(); }
    std::size_t total() const noexcept;
    double width(std::size_t k) const { return edges[k + 1] - edges[k]; }
    /// Geometric bin centers, the natural abscissa for log-log fits.
    std::vector<double> centers() const;

    friend bool operator==(const LogHistogram&, const LogHistogram&) = default;
};

/// Histogram over [lo, hi] with `bins_per_decade` bins per factor of ten.
/// The bin count is rounded up so the last edge is >= hi.
LogHistogram log_histogram(std::span<const double> values, double lo, double hi, int bins_per_decade);

/// Histogram spanning the sample from its minimum to its maximum; empty bins
/// are retained with zero density.
LogHistogram duration_histogram(std::span<const double> durations, int bins_per_decade = 8);

}  // namespace burstlab
