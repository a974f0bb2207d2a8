#include "burstlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "burstlab/error.hpp"

namespace burstlab {

double mean(std::span<const double> x) {
    detail::require(!x.empty(), "mean of an empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
    detail::require(x.size() >= 2, "sample variance needs at least two samples");
    // Two-pass: the mean of activity/volatility series is far from zero.
    const double m = mean(x);
    double ss = 0.0;
    double comp = 0.0;
    for (double v : x) {
        const double d = v - m;
        ss += d * d;
        comp += d;
    }
    const auto n = static_cast<double>(x.size());
    return (ss - comp * comp / n) / (n - 1.0);
}

double sample_std(std::span<const double> x) { return std::sqrt(sample_variance(x)); }

double pearson(std::span<const double> x, std::span<const double> y) {
    detail::require(x.size() == y.size(), "pearson: length mismatch");
    detail::require(x.size() >= 2, "pearson: need at least two pairs");
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    detail::require(sxx > 0.0 && syy > 0.0, "pearson: zero-variance input");
    return sxy / std::sqrt(sxx * syy);
}

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;  // series below converges slowly; value is 1 - O(1e-20)
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

// Stephens' small-sample correction to the asymptotic argument.
double corrected_lambda(double d, double n_eff) {
    const double s = std::sqrt(n_eff);
    return (s + 0.12 + 0.11 / s) * d;
}

}  // namespace

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    detail::require(!a.empty() && !b.empty(), "ks_two_sample: empty sample");
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const auto nx = static_cast<double>(x.size());
    const auto ny = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    const double n_eff = nx * ny / (nx + ny);
    return {d, kolmogorov_survival(corrected_lambda(d, n_eff))};
}

KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf) {
    detail::require(!sample.empty(), "ks_one_sample: empty sample");
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    const auto n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return {d, kolmogorov_survival(corrected_lambda(d, n))};
}

}  // namespace burstlab
