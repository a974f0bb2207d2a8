#pragma once

// Nonlinear SDE with multiplicative noise
//
//     dx = (eta - lambda/2) x^(2 eta - 1) dt + x^eta dW,
//
// restricted to [x_min, x_max] by reflection. Its stationary density is a
// power law x^-lambda and its spectrum is 1/f^beta with
// beta = 1 + (lambda - 3) / (2 eta - 2), although the increments carry no
// memory.
//
// Integration is Euler-Maruyama with the state-dependent step
// dt_i = kappa^2 x^(-2(eta-1)), which makes each step a relative move of
// O(kappa) whatever the level of x. Steps are shortened so that they never
// cross an output grid time.

#include <cstdint>
#include <limits>
#include <vector>

#include "burstlab/histogram.hpp"
#include "burstlab/series.hpp"

namespace burstlab {

struct SdeParams {
    double eta = 2.5;      // noise multiplicativity
    double lambda = 3.0;   // stationary density exponent
    double x_min = 1.0;
    double x_max = 1e3;
    double kappa = 0.1;    // relative step size
    double x0 = 1.0;

    /// Throws ValidationError on eta <= 1, lambda <= 1, bad bounds or kappa.
    void validate() const;
};

struct SdeControls {
    /// Test hook: drop the Wiener increment and integrate the drift alone.
    bool suppress_noise = false;
};

/// Path sampled at t = dt_out, 2 dt_out, ..., round(duration / dt_out) * dt_out;
/// each sample is the last internal state at or before the grid time.
UniformSeries simulate_sde(const SdeParams& params, double duration, double dt_out, std::uint64_t seed,
                           const SdeControls& controls = {});

/// Normalized C x^-lambda on [x_min, x_max] (logarithmic normalization at lambda = 1).
double stationary_pdf_theory(const SdeParams& params, double x);

struct SpectralExponents {
    double beta;
    double hurst;  // (beta - 1) / 2
};

SpectralExponents psd_exponent_theory(const SdeParams& params);

struct TransitionOptions {
    /// Exponent g in the time rescaling a^g t; NaN selects the model value 2(eta - 1).
    double time_exponent = std::numeric_limits<double>::quiet_NaN();
    int bins_per_decade = 20;
};

/// Empirical check of aP(ax', t | ax, 0) = P(x', a^(2(eta-1)) t | x, 0).
struct TransitionHistogramPair {
    LogHistogram direct;    // x(a^g t) from x_start
    LogHistogram rescaled;  // x(t) / a from a * x_start
    double scale_a = 1.0;
    double t = 0.0;
    double direct_horizon = 0.0;
    std::vector<double> direct_samples;
    std::vector<double> rescaled_samples;
    double boundary_fraction = 0.0;  // paths that reflected at x_min or x_max
    bool boundary_warning = false;   // boundary_fraction > 1%
};

TransitionHistogramPair transition_scaling_samples(const SdeParams& params, double x_start, double a, double t,
                                                   std::size_t n, std::uint64_t seed,
                                                   const TransitionOptions& options = {});

struct ReturnModelParams {
    double a0 = 0.0;     // endogenous impact
    double b0 = 1.0;     // used only when normalize is false
    double delta = 1.0;  // elementary return window (output dt)
    bool normalize = true;

    void validate() const;
};

struct ModelReturns {
    UniformSeries returns;  // r_t = b0 (1 + a0 x_t) w_t
    UniformSeries driver;   // x_t
    double b0;
};

/// Returns driven by the SDE path sampled every `delta`, with independent
/// standard Gaussian exogenous noise. With `normalize`, b0 is chosen so the
/// output has unit sample standard deviation.
ModelReturns generate_model_returns(const SdeParams& sde, const ReturnModelParams& model, double duration,
                                    std::uint64_t seed);

}  // namespace burstlab
