#include "burstlab/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "burstlab/error.hpp"
#include "burstlab/stats.hpp"

namespace burstlab {

using detail::require;

namespace {

// Sliding-window accumulators are re-summed exactly at this period so that
// rounding error does not accumulate over 10^7-sample series.
constexpr std::size_t kResyncPeriod = 1024;

void require_finite(std::span<const double> values, const char* what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw ValidationError(std::string(what) + ": non-finite value at index " + std::to_string(i));
        }
    }
}

}  // namespace

UniformSeries::UniformSeries(double t0, double dt, std::vector<double> values)
    : t0_(t0), dt_(dt), values_(std::move(values)) {
    require(std::isfinite(t0_), "UniformSeries: t0 must be finite");
    require(std::isfinite(dt_) && dt_ > 0.0, "UniformSeries: dt must be positive");
    require(!values_.empty(), "UniformSeries: values must be non-empty");
    require_finite(values_, "UniformSeries");
}

PriceSeries::PriceSeries(double t0, double dt, std::vector<double> prices)
    : t0_(t0), dt_(dt), prices_(std::move(prices)) {
    require(std::isfinite(t0_), "PriceSeries: t0 must be finite");
    require(std::isfinite(dt_) && dt_ > 0.0, "PriceSeries: dt must be positive");
    require(!prices_.empty(), "PriceSeries: prices must be non-empty");
    require_finite(prices_, "PriceSeries");
    for (std::size_t i = 0; i < prices_.size(); ++i) {
        if (prices_[i] <= 0.0) {
            throw ValidationError("PriceSeries: non-positive price at index " + std::to_string(i));
        }
    }
}

EventStream::EventStream(std::vector<double> timestamps) : timestamps_(std::move(timestamps)) {
    require_finite(timestamps_, "EventStream");
    for (std::size_t i = 1; i < timestamps_.size(); ++i) {
        if (!(timestamps_[i] > timestamps_[i - 1])) {
            throw ValidationError("EventStream: timestamps not strictly increasing at index " +
                                  std::to_string(i));
        }
    }
}

EventStream EventStream::shifted(double offset) const {
    std::vector<double> out(timestamps_);
    for (double& t : out) t += offset;
    return EventStream(std::move(out));
}

UniformSeries log_returns(const PriceSeries& prices, std::size_t delta_steps) {
    require(delta_steps >= 1, "log_returns: delta_steps must be >= 1");
    require(prices.size() > delta_steps, "log_returns: series must be longer than delta_steps");
    const auto p = prices.prices();
    std::vector<double> out(p.size() - delta_steps);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(p[i + delta_steps] / p[i]);
    return {prices.t0(), prices.dt(), std::move(out)};
}

UniformSeries aggregate_returns(const UniformSeries& returns, std::size_t m) {
    require(m >= 1, "aggregate_returns: m must be >= 1");
    require(returns.size() >= m, "aggregate_returns: series shorter than m");
    const auto r = returns.values();
    std::vector<double> out(r.size() / m);
    for (std::size_t b = 0; b < out.size(); ++b) {
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) s += r[b * m + k];
        out[b] = s;
    }
    return {returns.t0(), returns.dt() * static_cast<double>(m), std::move(out)};
}

UniformSeries rolling_std(const UniformSeries& series, std::size_t window) {
    require(window >= 2, "rolling_std: window must be >= 2");
    require(series.size() >= window, "rolling_std: window longer than series");
    const auto x = series.values();
    const auto w = static_cast<double>(window);
    const std::size_t n_out = x.size() - window + 1;
    std::vector<double> out(n_out);

    auto exact = [&](std::size_t start, double& mean_out, double& m2_out) {
        double m = 0.0;
        for (std::size_t k = 0; k < window; ++k) m += x[start + k];
        m /= w;
        double m2 = 0.0;
        for (std::size_t k = 0; k < window; ++k) {
            const double d = x[start + k] - m;
            m2 += d * d;
        }
        mean_out = m;
        m2_out = m2;
    };

    double m = 0.0, m2 = 0.0;
    exact(0, m, m2);
    out[0] = std::sqrt(m2 / (w - 1.0));
    for (std::size_t i = 1; i < n_out; ++i) {
        if (i % kResyncPeriod == 0) {
            exact(i, m, m2);
        } else {
            // Replace x_old by x_new in a fixed-size window (Welford update).
            const double x_old = x[i - 1];
            const double x_new = x[i + window - 1];
            const double m_new = m + (x_new - x_old) / w;
            m2 += (x_new - x_old) * (x_new - m_new + x_old - m);
            m = m_new;
            m2 = std::max(m2, 0.0);
        }
        out[i] = std::sqrt(m2 / (w - 1.0));
    }
    return {series.t0(), series.dt(), std::move(out)};
}

UniformSeries moving_average(const UniformSeries& series, std::size_t window) {
    require(window >= 1, "moving_average: window must be >= 1");
    require(series.size() >= window, "moving_average: window longer than series");
    const auto x = series.values();
    const auto w = static_cast<double>(window);
    const std::size_t n_out = x.size() - window + 1;
    std::vector<double> out(n_out);

    auto exact = [&](std::size_t start) {
        double s = 0.0;
        for (std::size_t k = 0; k < window; ++k) s += x[start + k];
        return s;
    };

    double sum = exact(0);
    out[0] = sum / w;
    for (std::size_t i = 1; i < n_out; ++i) {
        sum = (i % kResyncPeriod == 0) ? exact(i) : sum + x[i + window - 1] - x[i - 1];
        out[i] = sum / w;
    }
    return {series.t0(), series.dt(), std::move(out)};
}

NormalizedSeries normalize_unit_std(const UniformSeries& series) {
    require(series.size() >= 2, "normalize_unit_std: need at least two samples");
    const double s = sample_std(series.values());
    require(s > 0.0, "normalize_unit_std: zero-variance input");
    std::vector<double> out(series.values().begin(), series.values().end());
    for (double& v : out) v /= s;
    return {UniformSeries(series.t0(), series.dt(), std::move(out)), s};
}

}  // namespace burstlab
