#include "burstlab/point_process.hpp"

#include <algorithm>
#include <cmath>

#include "burstlab/error.hpp"
#include "burstlab/rng.hpp"

namespace burstlab {

using detail::require;

void PoissonPipelineConfig::validate() const {
    require(std::isfinite(bin_seconds) && bin_seconds > 0.0, "bin_seconds must be > 0");
    require(ma_window >= 1, "ma_window must be >= 1");
}

EventStream generate_events(const UniformSeries& rate, std::uint64_t seed) {
    const auto r = rate.values();
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!(r[i] > 0.0)) throw ValidationError("generate_events: non-positive rate at index " + std::to_string(i));
    }
    RandomSource rng(seed);
    std::vector<double> events;
    double expected = 0.0;
    for (double v : r) expected += v * rate.dt();
    events.reserve(static_cast<std::size_t>(expected + 10.0 * std::sqrt(expected) + 16.0));

    // Time change: events occur when the integrated rate has consumed an
    // Exp(1) hazard. Within interval i the hazard burns at r[i] per second.
    double hazard = rng.exponential();
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double start = rate.time_at(i);
        double elapsed = 0.0;
        double capacity = r[i] * rate.dt();
        while (hazard <= capacity) {
            elapsed += hazard / r[i];
            capacity -= hazard;
            const double t = start + elapsed;
            // identical doubles can only arise from rounding at ~1e-16 relative
            if (events.empty() || t > events.back()) events.push_back(t);
            hazard = rng.exponential();
        }
        hazard -= capacity;
    }
    return EventStream(std::move(events));
}

UniformSeries rate_from_driver(const UniformSeries& driver, double counts_per_unit, double bin_seconds, double t0) {
    require(counts_per_unit > 0.0 && std::isfinite(counts_per_unit), "rate_from_driver: counts_per_unit must be > 0");
    require(bin_seconds > 0.0 && std::isfinite(bin_seconds), "rate_from_driver: bin_seconds must be > 0");
    std::vector<double> rate(driver.values().begin(), driver.values().end());
    for (double& v : rate) v *= counts_per_unit / bin_seconds;
    return {t0, bin_seconds, std::move(rate)};
}

UniformSeries bin_counts(const EventStream& events, double bin_seconds, double t_start, double t_end) {
    require(std::isfinite(bin_seconds) && bin_seconds > 0.0, "bin_counts: bin_seconds must be > 0");
    require(std::isfinite(t_start) && std::isfinite(t_end) && t_start < t_end, "bin_counts: need t_start < t_end");
    const auto n_bins = static_cast<std::size_t>(std::ceil((t_end - t_start) / bin_seconds - 1e-9));
    std::vector<double> counts(std::max<std::size_t>(n_bins, 1), 0.0);
    for (double t : events.timestamps()) {
        if (t < t_start || t >= t_end) continue;
        auto k = static_cast<std::size_t>((t - t_start) / bin_seconds);
        k = std::min(k, counts.size() - 1);
        counts[k] += 1.0;
    }
    return {t_start, bin_seconds, std::move(counts)};
}

UniformSeries anscombe_forward(const UniformSeries& counts) {
    std::vector<double> out(counts.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double x = counts[i];
        if (x < 0.0) throw ValidationError("anscombe_forward: negative input at index " + std::to_string(i));
        out[i] = 2.0 * std::sqrt(x + 0.375);
    }
    return {counts.t0(), counts.dt(), std::move(out)};
}

double anscombe_inverse_algebraic(double transformed) { return 0.25 * transformed * transformed - 0.375; }

InverseAnscombe anscombe_inverse_unbiased(const UniformSeries& transformed) {
    static const double s = std::sqrt(1.5);
    InverseAnscombe result{transformed, 0};
    std::vector<double> out(transformed.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double d = transformed[i];
        if (d <= kAnscombeFloor + kAnscombeClampEpsilon) {
            if (d < kAnscombeFloor - kAnscombeClampEpsilon) ++result.clamped;
            out[i] = 0.0;
            continue;
        }
        const double inv = 1.0 / d;
        const double x = 0.25 * d * d + 0.25 * s * inv - 1.375 * inv * inv + 0.625 * s * inv * inv * inv - 0.125;
        out[i] = std::max(x, 0.0);
    }
    result.values = UniformSeries(transformed.t0(), transformed.dt(), std::move(out));
    return result;
}

DenoisedActivity denoise_activity(const EventStream& events, const PoissonPipelineConfig& config,
                                  const ActivityWindow& window) {
    config.validate();
    const double bin = config.bin_seconds;
    double t_start = 0.0, t_end = 0.0;
    if (window.t_start) {
        t_start = *window.t_start;
    } else {
        require(!events.empty(), "denoise_activity: empty stream needs an explicit window");
        t_start = std::floor(events.timestamps().front() / bin) * bin;
    }
    if (window.t_end) {
        t_end = *window.t_end;
    } else {
        require(!events.empty(), "denoise_activity: empty stream needs an explicit window");
        t_end = (std::floor(events.timestamps().back() / bin) + 1.0) * bin;
    }

    DenoisedActivity out{UniformSeries(0.0, 1.0, {0.0}), 0, {}};
    auto counts = bin_counts(events, bin, t_start, t_end);
    out.stages.emplace_back("bin_counts");
    auto forward = anscombe_forward(counts);
    out.stages.emplace_back("anscombe_forward");
    auto smoothed = moving_average(forward, config.ma_window);
    out.stages.emplace_back("moving_average");
    auto inverse = anscombe_inverse_unbiased(smoothed);
    out.stages.emplace_back("anscombe_inverse_unbiased");
    out.activity = std::move(inverse.values);
    out.clamped = inverse.clamped;
    return out;
}

}  // namespace burstlab
