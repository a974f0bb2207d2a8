#include "burstlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "burstlab/error.hpp"
#include "burstlab/rng.hpp"
#include "fft.hpp"

namespace burstlab {

using detail::require;

SpectrumEstimate welch_psd(const UniformSeries& series, std::size_t segment_len, double overlap_fraction) {
    require(segment_len >= 16, "welch_psd: segment_len must be >= 16");
    require(series.size() >= segment_len, "welch_psd: series shorter than one segment");
    require(overlap_fraction >= 0.0 && overlap_fraction < 1.0, "welch_psd: overlap_fraction must lie in [0, 1)");

    const std::size_t L = segment_len;
    const auto overlap = static_cast<std::size_t>(std::llround(overlap_fraction * static_cast<double>(L)));
    const std::size_t stride = std::max<std::size_t>(1, L - std::min(overlap, L - 1));
    const std::size_t segments = (series.size() - L) / stride + 1;

    std::vector<double> window(L);
    double w2 = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
        window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(L));
        w2 += window[i] * window[i];
    }

    const std::size_t half = L / 2;
    std::vector<double> acc(half + 1, 0.0);
    detail::RealFft fft(L);
    const auto v = series.values();
    for (std::size_t s = 0; s < segments; ++s) {
        const auto seg = v.subspan(s * stride, L);
        double m = 0.0;
        for (double x : seg) m += x;
        m /= static_cast<double>(L);
        auto in = fft.input();
        for (std::size_t i = 0; i < L; ++i) in[i] = (seg[i] - m) * window[i];
        fft.execute();
        for (std::size_t k = 1; k <= half; ++k) acc[k] += std::norm(fft.output(k));
    }

    const double dt = series.dt();
    SpectrumEstimate out;
    out.segments_used = segments;
    out.frequencies.reserve(half);
    out.power.reserve(half);
    for (std::size_t k = 1; k <= half; ++k) {
        const double one_sided = (L % 2 == 0 && k == half) ? 1.0 : 2.0;
        out.frequencies.push_back(static_cast<double>(k) / (static_cast<double>(L) * dt));
        out.power.push_back(one_sided * dt * acc[k] / (w2 * static_cast<double>(segments)));
    }
    return out;
}

SpectrumEstimate log_bin_spectrum(const SpectrumEstimate& spectrum, int bins_per_decade) {
    require(bins_per_decade >= 1, "log_bin_spectrum: bins_per_decade must be >= 1");
    require(!spectrum.frequencies.empty(), "log_bin_spectrum: empty spectrum");
    const double f0 = spectrum.frequencies.front();
    SpectrumEstimate out;
    out.segments_used = spectrum.segments_used;
    out.log_binned = true;

    std::size_t i = 0;
    const std::size_t n = spectrum.frequencies.size();
    while (i < n) {
        const auto bin = static_cast<long>(std::floor(std::log10(spectrum.frequencies[i] / f0) * bins_per_decade + 1e-9));
        double log_f = 0.0, p = 0.0;
        std::size_t count = 0;
        while (i < n &&
               static_cast<long>(std::floor(std::log10(spectrum.frequencies[i] / f0) * bins_per_decade + 1e-9)) == bin) {
            log_f += std::log(spectrum.frequencies[i]);
            p += spectrum.power[i];
            ++count;
            ++i;
        }
        out.frequencies.push_back(std::exp(log_f / static_cast<double>(count)));
        out.power.push_back(p / static_cast<double>(count));
    }
    return out;
}

SpectrumEstimate merge_spectra(std::span<const SpectrumEstimate> spectra) {
    require(!spectra.empty(), "merge_spectra: nothing to merge");
    SpectrumEstimate out;
    out.frequencies = spectra.front().frequencies;
    out.log_binned = spectra.front().log_binned;
    out.power.assign(out.frequencies.size(), 0.0);
    for (const auto& s : spectra) {
        require(s.frequencies == out.frequencies && s.log_binned == out.log_binned,
                "merge_spectra: frequency grids differ");
        require(s.segments_used > 0, "merge_spectra: spectrum without segments");
        out.segments_used += s.segments_used;
        for (std::size_t k = 0; k < s.power.size(); ++k) out.power[k] += static_cast<double>(s.segments_used) * s.power[k];
    }
    for (double& p : out.power) p /= static_cast<double>(out.segments_used);
    return out;
}

namespace {

struct LineFit {
    PowerLawFit fit;
    double rss;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y, double lo, double hi) {
    require(x.size() == y.size(), "fit_power_law: x and y differ in length");
    require(std::isfinite(lo) && std::isfinite(hi) && lo > 0.0 && lo < hi, "fit_power_law: need 0 < lo < hi");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] >= lo && x[i] <= hi && y[i] > 0.0 && std::isfinite(y[i])) {
            lx.push_back(std::log10(x[i]));
            ly.push_back(std::log10(y[i]));
        }
    }
    const std::size_t n = lx.size();
    if (n < 5) {
        throw ValidationError("fit_power_law: " + std::to_string(n) + " usable points in range, need at least 5");
    }
    const double nd = static_cast<double>(n);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= nd;
    my /= nd;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    require(sxx > 0.0, "fit_power_law: all abscissae coincide");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (intercept + slope * lx[i]);
        rss += r * r;
    }
    LineFit out{};
    out.rss = rss;
    out.fit.exponent = -slope;
    out.fit.intercept = intercept;
    out.fit.lo = std::pow(10.0, *std::min_element(lx.begin(), lx.end()));
    out.fit.hi = std::pow(10.0, *std::max_element(lx.begin(), lx.end()));
    out.fit.std_error = n > 2 ? std::sqrt(rss / (nd - 2.0) / sxx) : 0.0;
    out.fit.r2 = syy > 0.0 ? 1.0 - rss / syy : 1.0;
    out.fit.n = n;
    out.fit.method = FitMethod::least_squares;
    return out;
}

}  // namespace

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y, double lo, double hi) {
    return fit_line(x, y, lo, hi).fit;
}

PowerLawFit fit_power_law(const SpectrumEstimate& spectrum, double lo, double hi) {
    return fit_power_law(spectrum.frequencies, spectrum.power, lo, hi);
}

PowerLawFit fit_power_law(const LogHistogram& histogram, double lo, double hi, bool skip_first_bin) {
    auto centers = histogram.centers();
    std::vector<double> density = histogram.density;
    if (skip_first_bin && !centers.empty()) {
        centers.erase(centers.begin());
        density.erase(density.begin());
    }
    return fit_power_law(centers, density, lo, hi);
}

std::vector<double> break_search_grid(const SpectrumEstimate& spectrum, int per_decade, std::size_t min_points) {
    require(per_decade >= 1, "break_search_grid: per_decade must be >= 1");
    const auto& f = spectrum.frequencies;
    std::vector<double> grid;
    if (f.size() < 2 * min_points) return grid;
    // candidates in (f[min_points - 1], f[n - min_points]]
    const double lo = f[min_points - 1];
    const double hi = f[f.size() - min_points];
    const double step = 1.0 / per_decade;
    const double start = std::ceil(std::log10(lo) / step + 1e-9) * step;
    for (double e = start; std::pow(10.0, e) <= hi * (1.0 + 1e-12); e += step) grid.push_back(std::pow(10.0, e));
    return grid;
}

namespace {

// Residual sums of straight-line fits over any contiguous range, from prefix sums.
class PrefixLines {
public:
    PrefixLines(std::span<const double> x, std::span<const double> y) : sx_(1, 0.0), sy_(1, 0.0), sxx_(1, 0.0), sxy_(1, 0.0), syy_(1, 0.0) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            sx_.push_back(sx_.back() + x[i]);
            sy_.push_back(sy_.back() + y[i]);
            sxx_.push_back(sxx_.back() + x[i] * x[i]);
            sxy_.push_back(sxy_.back() + x[i] * y[i]);
            syy_.push_back(syy_.back() + y[i] * y[i]);
        }
    }

    double rss(std::size_t a, std::size_t b) const {
        const double n = static_cast<double>(b - a);
        const double mx = (sx_[b] - sx_[a]) / n;
        const double my = (sy_[b] - sy_[a]) / n;
        const double cxx = (sxx_[b] - sxx_[a]) - n * mx * mx;
        const double cxy = (sxy_[b] - sxy_[a]) - n * mx * my;
        const double cyy = (syy_[b] - syy_[a]) - n * my * my;
        return std::max(cyy - cxy * cxy / cxx, 0.0);
    }

private:
    std::vector<double> sx_, sy_, sxx_, sxy_, syy_;
};

// Largest F statistic for a break over the candidate splits.
double sup_f(const PrefixLines& lines, std::size_t n, std::span<const std::size_t> splits) {
    const double single = lines.rss(0, n);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k : splits) best = std::min(best, lines.rss(0, k) + lines.rss(k, n));
    if (best <= 0.0) return std::numeric_limits<double>::infinity();
    return 0.5 * (single - best) / (best / static_cast<double>(n - 4));
}

constexpr std::size_t kMinSidePoints = 5;
constexpr int kNullReplicates = 999;
constexpr std::uint64_t kNullSeed = 0x7eb1a5e5ULL;

}  // namespace

TwoRegimeFit fit_two_regime_psd(const SpectrumEstimate& spectrum, std::span<const double> break_grid) {
    require(spectrum.frequencies.size() == spectrum.power.size(), "fit_two_regime_psd: length mismatch");
    std::vector<double> f, p;
    for (std::size_t i = 0; i < spectrum.frequencies.size(); ++i) {
        if (spectrum.power[i] > 0.0 && std::isfinite(spectrum.power[i])) {
            f.push_back(spectrum.frequencies[i]);
            p.push_back(spectrum.power[i]);
        }
    }
    require(f.size() >= 2 * kMinSidePoints, "fit_two_regime_psd: spectrum too short");
    require(std::log10(f.back() / f.front()) >= 3.0 - 1e-9, "fit_two_regime_psd: spectrum must span >= 3 decades");
    require(!break_grid.empty(), "fit_two_regime_psd: empty break grid");

    std::vector<std::size_t> splits;
    for (double fb : break_grid) {
        const auto k = static_cast<std::size_t>(std::lower_bound(f.begin(), f.end(), fb) - f.begin());
        if (k < kMinSidePoints || f.size() - k < kMinSidePoints) continue;
        if (splits.empty() || splits.back() != k) splits.push_back(k);
    }
    if (splits.empty()) {
        throw ValidationError("fit_two_regime_psd: degenerate grid, no break leaves 5 points on each side");
    }

    const auto single = fit_line(f, p, f.front(), f.back());
    TwoRegimeFit best{};
    best.rss_two = std::numeric_limits<double>::infinity();
    for (double fb : break_grid) {
        const auto k = static_cast<std::size_t>(std::lower_bound(f.begin(), f.end(), fb) - f.begin());
        if (k < kMinSidePoints || f.size() - k < kMinSidePoints) continue;
        const auto low = fit_line(std::span(f).first(k), std::span(p).first(k), f.front(), f[k - 1]);
        const auto high = fit_line(std::span(f).subspan(k), std::span(p).subspan(k), f[k], f.back());
        const double rss = low.rss + high.rss;
        if (rss < best.rss_two) {
            best.rss_two = rss;
            best.low = low.fit;
            best.high = high.fit;
            best.f_break = fb;
        }
    }
    best.single = single.fit;
    best.rss_single = single.rss;

    // Null distribution of the break statistic for a single line with
    // Gaussian scatter on this abscissa grid; it does not depend on the
    // line's parameters or the scatter's size.
    std::vector<double> lx(f.size()), ly(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        lx[i] = std::log10(f[i]);
        ly[i] = std::log10(p[i]);
    }
    const std::size_t n = f.size();
    const double observed = sup_f(PrefixLines(lx, ly), n, splits);
    RandomSource rng(kNullSeed);
    std::size_t exceed = 0;
    std::vector<double> noise(n);
    for (int r = 0; r < kNullReplicates; ++r) {
        for (double& e : noise) e = rng.gaussian();
        exceed += sup_f(PrefixLines(lx, noise), n, splits) >= observed ? 1 : 0;
    }
    best.break_p_value = static_cast<double>(exceed + 1) / static_cast<double>(kNullReplicates + 1);

    const double joint = std::hypot(best.low.std_error, best.high.std_error);
    best.break_reliable = best.break_p_value < kBreakSignificance &&
                          std::fabs(best.low.exponent - best.high.exponent) >= std::max(2.0 * joint, 0.05);
    return best;
}

TwoRegimeFit fit_two_regime_psd(const SpectrumEstimate& spectrum) {
    const auto grid = break_search_grid(spectrum);
    return fit_two_regime_psd(spectrum, grid);
}

HurstEstimate hurst_from_beta(double beta) {
    const double h = (beta - 1.0) / 2.0;
    return {h, h > 0.0 && h < 1.0};
}

namespace {

// For u = ln x with density proportional to exp(s u) on [a, a + L], s = 1 - alpha.
double truncated_mean(double s, double a, double L) {
    if (std::fabs(s) * L < 1e-6) return a + 0.5 * L + s * L * L / 12.0;
    return a - 1.0 / s - L / std::expm1(-s * L);
}

double truncated_variance(double s, double L) {
    if (std::fabs(s) * L < 1e-4) return L * L / 12.0;
    const double sh = std::sinh(0.5 * s * L);
    return 1.0 / (s * s) - L * L / (4.0 * sh * sh);
}

}  // namespace

PowerLawFit fit_duration_exponent_mle(std::span<const double> durations, double lo, double hi) {
    require(std::isfinite(lo) && std::isfinite(hi) && lo > 0.0, "fit_duration_exponent_mle: need 0 < lo < hi");
    require(hi > lo * (1.0 + 1e-3), "fit_duration_exponent_mle: degenerate range");
    double sum = 0.0;
    std::size_t n = 0;
    for (double d : durations) {
        if (d >= lo && d <= hi) {
            sum += std::log(d);
            ++n;
        }
    }
    if (n < 100) {
        throw ValidationError("fit_duration_exponent_mle: " + std::to_string(n) + " durations in range, need at least 100");
    }
    const double a = std::log(lo);
    const double L = std::log(hi) - a;
    const double target = sum / static_cast<double>(n);

    // The mean of u decreases monotonically in alpha.
    double lo_alpha = -20.0, hi_alpha = 20.0;
    if (target >= truncated_mean(1.0 - lo_alpha, a, L) || target <= truncated_mean(1.0 - hi_alpha, a, L)) {
        throw NumericalError("fit_duration_exponent_mle: exponent outside [-20, 20]", 0);
    }
    for (int i = 0; i < 200 && hi_alpha - lo_alpha > 1e-13; ++i) {
        const double mid = 0.5 * (lo_alpha + hi_alpha);
        (truncated_mean(1.0 - mid, a, L) > target ? lo_alpha : hi_alpha) = mid;
    }
    const double alpha = 0.5 * (lo_alpha + hi_alpha);
    const double s = 1.0 - alpha;

    PowerLawFit fit;
    fit.exponent = alpha;
    fit.lo = lo;
    fit.hi = hi;
    fit.n = n;
    fit.method = FitMethod::maximum_likelihood;
    fit.std_error = 1.0 / std::sqrt(static_cast<double>(n) * truncated_variance(s, L));
    // normalization of p(x) = C x^-alpha on [lo, hi]
    const double norm = std::fabs(s) * L < 1e-12 ? 1.0 / L : s / (std::pow(hi, s) - std::pow(lo, s));
    fit.intercept = std::log10(norm);
    fit.r2 = 0.0;
    return fit;
}

}  // namespace burstlab
