#pragma once

// Core value types shared by every stage of the analysis: uniformly sampled
// signals, price paths and event (trade) timestamps, plus the filtering
// primitives applied to them before threshold analysis.
//
// Sliding-window filters are left-aligned: output sample i summarizes input
// samples [i, i + window), so the output keeps the input t0 and is
// window - 1 samples shorter. A causal (streaming) filter would report the
// same value at time t0 + (i + window - 1) * dt instead.

#include <cstddef>
#include <span>
#include <vector>

namespace burstlab {

/// Uniformly sampled real signal. Sample i sits at t0 + i * dt.
class UniformSeries {
public:
    UniformSeries(double t0, double dt, std::vector<double> values);

    double t0() const noexcept { return t0_; }
    double dt() const noexcept { return dt_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double time_at(std::size_t i) const noexcept { return t0_ + static_cast<double>(i) * dt_; }
    /// Length of the sampled timeline, size() * dt.
    double span() const noexcept { return static_cast<double>(values_.size()) * dt_; }

    /// Moves the samples out, leaving the series empty (and thus invalid).
    std::vector<double> release() && { return std::move(values_); }

    friend bool operator==(const UniformSeries&, const UniformSeries&) = default;

private:
    double t0_;
    double dt_;
    std::vector<double> values_;
};

/// Uniformly sampled strictly positive asset prices S(t).
class PriceSeries {
public:
    PriceSeries(double t0, double dt, std::vector<double> prices);

    double t0() const noexcept { return t0_; }
    double dt() const noexcept { return dt_; }
    std::size_t size() const noexcept { return prices_.size(); }
    std::span<const double> prices() const noexcept { return prices_; }

    friend bool operator==(const PriceSeries&, const PriceSeries&) = default;

private:
    double t0_;
    double dt_;
    std::vector<double> prices_;
};

/// Strictly increasing, finite event timestamps (epoch seconds).
class EventStream {
public:
    EventStream() = default;
    explicit EventStream(std::vector<double> timestamps);

    std::size_t size() const noexcept { return timestamps_.size(); }
    bool empty() const noexcept { return timestamps_.empty(); }
    std::span<const double> timestamps() const noexcept { return timestamps_; }

    /// Same stream with every timestamp moved by `offset` seconds.
    EventStream shifted(double offset) const;

    friend bool operator==(const EventStream&, const EventStream&) = default;

private:
    std::vector<double> timestamps_;
};

/// Overlapping log returns ln(S(t + delta) / S(t)), delta = delta_steps * dt,
/// one per input sample (stride 1). Output keeps t0 and dt of the prices.
UniformSeries log_returns(const PriceSeries& prices, std::size_t delta_steps);

/// Non-overlapping sums of m consecutive returns; output dt = m * dt.
/// Trailing samples that do not fill a block are dropped.
UniformSeries aggregate_returns(const UniformSeries& returns, std::size_t m);

/// Left-aligned rolling sample standard deviation (divisor window - 1).
UniformSeries rolling_std(const UniformSeries& series, std::size_t window);

/// Left-aligned rolling mean.
UniformSeries moving_average(const UniformSeries& series, std::size_t window);

struct NormalizedSeries {
    UniformSeries series;
    double scale;  // sample std of the input; output = input / scale
};

/// Divides by the sample standard deviation. The mean is kept: thresholds are
/// applied to positive magnitudes (activity, volatility).
NormalizedSeries normalize_unit_std(const UniformSeries& series);

}  // namespace burstlab
