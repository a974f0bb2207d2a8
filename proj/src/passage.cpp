#include "burstlab/passage.hpp"

#include <cmath>

#include "burstlab/error.hpp"

namespace burstlab {

const char* to_string(EpisodeKind kind) noexcept {
    return kind == EpisodeKind::burst ? "burst" : "interburst";
}

EpisodeKind episode_kind_from_string(const std::string& name) {
    if (name == "burst") return EpisodeKind::burst;
    if (name == "interburst") return EpisodeKind::interburst;
    throw ValidationError("unknown episode kind '" + name + "'");
}

std::vector<double> BurstSet::durations(EpisodeKind kind) const {
    std::vector<double> out;
    out.reserve(episodes.size() / 2 + 1);
    for (const auto& e : episodes) {
        if (e.kind == kind) out.push_back(e.duration);
    }
    return out;
}

std::size_t BurstSet::count(EpisodeKind kind) const {
    std::size_t n = 0;
    for (const auto& e : episodes) n += e.kind == kind ? 1 : 0;
    return n;
}

BurstSet extract_bursts(const UniformSeries& series, double threshold, DurationConvention convention) {
    detail::require(std::isfinite(threshold), "extract_bursts: threshold must be finite");
    const auto v = series.values();
    const std::size_t n = v.size();
    const double dt = series.dt();

    BurstSet set;
    set.threshold = threshold;
    set.dt = dt;
    set.convention = convention;
    set.span = series.span();

    // Crossing time between samples i-1 and i.
    auto crossing = [&](std::size_t i) {
        const double frac = (threshold - v[i - 1]) / (v[i] - v[i - 1]);
        return series.time_at(i - 1) + frac * dt;
    };

    std::size_t run_start = 0;
    bool above = v[0] > threshold;
    for (std::size_t i = 1; i <= n; ++i) {
        const bool boundary = i == n || (v[i] > threshold) != above;
        if (!boundary) continue;
        const std::size_t len = i - run_start;
        if (run_start == 0 || i == n) {
            ++set.edge_censored;
            set.censored_samples += len;
        } else {
            Episode e;
            e.kind = above ? EpisodeKind::burst : EpisodeKind::interburst;
            e.samples = len;
            if (convention == DurationConvention::sample_count) {
                e.start = series.time_at(run_start);
                e.duration = static_cast<double>(len) * dt;
            } else {
                e.start = crossing(run_start);
                e.duration = crossing(i) - e.start;
            }
            e.end = e.start + e.duration;
            set.episodes.push_back(e);
        }
        if (i < n) {
            run_start = i;
            above = !above;
        }
    }
    return set;
}

DurationSample durations_of(const BurstSet& set, EpisodeKind kind, std::string label) {
    return {std::move(label), kind, set.durations(kind)};
}

PooledDurations pool_durations(std::span<const DurationSample> samples) {
    detail::require(!samples.empty(), "pool_durations: nothing to pool");
    PooledDurations pooled;
    pooled.kind = samples.front().kind;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        if (samples[s].kind != pooled.kind) {
            throw ValidationError("pool_durations: cannot pool " + std::string(to_string(samples[s].kind)) +
                                  " durations with " + to_string(pooled.kind) + " durations");
        }
        pooled.labels.push_back(samples[s].label);
        pooled.values.insert(pooled.values.end(), samples[s].values.begin(), samples[s].values.end());
        pooled.source.insert(pooled.source.end(), samples[s].values.size(), s);
    }
    return pooled;
}

}  // namespace burstlab
