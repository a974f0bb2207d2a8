#include "burstlab/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "burstlab/error.hpp"

namespace burstlab {

std::size_t LogHistogram::total() const noexcept {
    return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

std::vector<double> LogHistogram::centers() const {
    std::vector<double> c(counts.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = std::sqrt(edges[k] * edges[k + 1]);
    return c;
}

LogHistogram log_histogram(std::span<const double> values, double lo, double hi, int bins_per_decade) {
    detail::require(bins_per_decade >= 1, "log_histogram: bins_per_decade must be >= 1");
    detail::require(lo > 0.0 && std::isfinite(lo) && std::isfinite(hi) && hi >= lo,
                    "log_histogram: need 0 < lo <= hi");
    const double step = 1.0 / bins_per_decade;
    const double decades = std::log10(hi / lo);
    const auto n_bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(decades / step - 1e-9)));

    LogHistogram h;
    h.edges.resize(n_bins + 1);
    for (std::size_t k = 0; k <= n_bins; ++k) h.edges[k] = lo * std::pow(10.0, static_cast<double>(k) * step);
    h.edges.back() = std::max(h.edges.back(), hi);
    h.counts.assign(n_bins, 0);

    const double log_lo = std::log10(lo);
    for (double v : values) {
        if (!(v >= lo) || v > h.edges.back()) continue;
        auto k = static_cast<std::size_t>((std::log10(v) - log_lo) / step);
        k = std::min(k, n_bins - 1);
        // log10 rounding can land one bin off near an edge
        while (k > 0 && v < h.edges[k]) --k;
        while (k + 1 < n_bins && v >= h.edges[k + 1]) ++k;
        ++h.counts[k];
    }

    const auto n = static_cast<double>(h.total());
    h.density.assign(n_bins, 0.0);
    if (n > 0) {
        for (std::size_t k = 0; k < n_bins; ++k) h.density[k] = static_cast<double>(h.counts[k]) / (n * h.width(k));
    }
    return h;
}

LogHistogram duration_histogram(std::span<const double> durations, int bins_per_decade) {
    detail::require(!durations.empty(), "duration_histogram: empty input");
    const auto [mn, mx] = std::minmax_element(durations.begin(), durations.end());
    detail::require(*mn > 0.0, "duration_histogram: durations must be positive");
    return log_histogram(durations, *mn, *mx, bins_per_decade);
}

}  // namespace burstlab
