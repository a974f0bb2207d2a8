#pragma once

// Exact fractional Gaussian noise / fractional Brownian motion sampling, the
// correlated-increment ("true long memory") alternative to the nonlinear SDE.
//
// Circulant embedding (Davies-Harte) is the primary sampler. Each complex
// Gaussian draw yields two independent paths (real and imaginary parts).
// If the embedding spectrum has significantly negative eigenvalues the
// sampler falls back to exact conditional (Durbin-Levinson) generation,
// which is O(n^2) and therefore limited to short paths.

#include <cstdint>
#include <vector>

#include "burstlab/series.hpp"

namespace burstlab {

struct FbmParams {
    double hurst = 0.5;
    std::size_t n = 1024;
    double dt = 1.0;
    double sigma = 1.0;  // std of one increment

    void validate() const;
};

/// gamma(k) = sigma^2/2 (|k+1|^2H - 2|k|^2H + |k-1|^2H)
double fgn_autocovariance(double hurst, double sigma, std::size_t lag);

enum class FgnMethod { automatic, circulant_embedding, levinson };

const char* to_string(FgnMethod method) noexcept;

struct FgnOptions {
    FgnMethod method = FgnMethod::automatic;
    std::size_t max_samples = std::size_t{1} << 28;
    std::size_t max_levinson_samples = std::size_t{1} << 15;
};

struct FgnEnsemble {
    std::vector<UniformSeries> paths;  // each sampled at t = dt, 2 dt, ...
    FgnMethod method;                  // sampler actually used
};

/// `paths` independent fGn sequences of params.n samples.
FgnEnsemble simulate_fgn_ensemble(const FbmParams& params, std::size_t paths, std::uint64_t seed,
                                  const FgnOptions& options = {});

struct FgnSample {
    UniformSeries series;
    FgnMethod method;
};

FgnSample simulate_fgn(const FbmParams& params, std::uint64_t seed, const FgnOptions& options = {});

/// Running sum of fGn; the first value equals the first increment.
FgnSample simulate_fbm(const FbmParams& params, std::uint64_t seed, const FgnOptions& options = {});
FgnEnsemble simulate_fbm_ensemble(const FbmParams& params, std::size_t paths, std::uint64_t seed,
                                  const FgnOptions& options = {});

UniformSeries cumulative_sum(const UniformSeries& increments);

/// Positive exponent of the fBm level-crossing duration law p(T) ~ T^-(2 - H).
double fbm_passage_exponent_theory(double hurst);

}  // namespace burstlab
