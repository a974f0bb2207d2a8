#include "burstlab/sde.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "burstlab/error.hpp"
#include "burstlab/rng.hpp"
#include "burstlab/stats.hpp"

namespace burstlab {

using detail::require;

void SdeParams::validate() const {
    require(std::isfinite(eta) && eta > 1.0, "SdeParams: eta must be > 1");
    require(std::isfinite(lambda) && lambda > 1.0, "SdeParams: lambda must be > 1");
    require(std::isfinite(x_min) && x_min > 0.0, "SdeParams: x_min must be > 0");
    require(std::isfinite(x_max) && x_max > x_min, "SdeParams: x_max must exceed x_min");
    require(kappa > 0.0 && kappa <= 1.0, "SdeParams: kappa must lie in (0, 1]");
    require(x0 >= x_min && x0 <= x_max, "SdeParams: x0 outside [x_min, x_max]");
}

void ReturnModelParams::validate() const {
    require(std::isfinite(a0) && a0 >= 0.0, "ReturnModelParams: a0 must be >= 0");
    require(std::isfinite(b0) && b0 > 0.0, "ReturnModelParams: b0 must be > 0");
    require(std::isfinite(delta) && delta > 0.0, "ReturnModelParams: delta must be > 0");
}

namespace {

// One Euler-Maruyama walker. With h_full = kappa^2 x^-(2eta-2) the update
//   dx = drift x^(2eta-1) h + x^eta sqrt(h) xi
// reduces to dx = x (drift kappa^2 r + kappa sqrt(r) xi), r = h / h_full <= 1.
class Integrator {
public:
    Integrator(const SdeParams& p, RandomSource& rng, const SdeControls& controls)
        : p_(p),
          rng_(rng),
          drift_k2_((p.eta - 0.5 * p.lambda) * p.kappa * p.kappa),
          k2_(p.kappa * p.kappa),
          exponent_(2.0 * (p.eta - 1.0)),
          noise_(!controls.suppress_noise) {}

    // Advances x by exactly `horizon`.
    double advance(double x, double horizon) {
        double remaining = horizon;
        while (true) {
            const double h_full = k2_ * inverse_power(x);
            const bool last = h_full >= remaining;
            const double r = last ? remaining / h_full : 1.0;
            const double xi = noise_ ? rng_.gaussian() : 0.0;
            x += x * (drift_k2_ * r + p_.kappa * std::sqrt(r) * xi);
            x = reflect(x);
            ++steps_;
            if (last) return x;
            remaining -= h_full;
        }
    }

    std::uint64_t steps() const noexcept { return steps_; }
    bool touched_boundary() const noexcept { return touched_; }
    void reset_touch() noexcept { touched_ = false; }

private:
    double inverse_power(double x) const {
        // eta = 5/2 and eta = 2 are the workhorse cases
        if (exponent_ == 3.0) return 1.0 / (x * x * x);
        if (exponent_ == 2.0) return 1.0 / (x * x);
        return std::pow(x, -exponent_);
    }

    double reflect(double x) {
        if (!std::isfinite(x)) throw NumericalError("simulate_sde: non-finite state", steps_);
        if (x >= p_.x_min && x <= p_.x_max) return x;
        touched_ = true;
        // Fold back until inside; repeated folds only occur for huge jumps.
        for (int fold = 0; fold < 64; ++fold) {
            if (x < p_.x_min) {
                x = 2.0 * p_.x_min - x;
            } else if (x > p_.x_max) {
                x = 2.0 * p_.x_max - x;
            } else {
                return x;
            }
        }
        throw NumericalError("simulate_sde: state " + std::to_string(x) + " left [x_min, x_max]", steps_);
    }

    const SdeParams& p_;
    RandomSource& rng_;
    double drift_k2_;
    double k2_;
    double exponent_;
    bool noise_;
    std::uint64_t steps_ = 0;
    bool touched_ = false;
};

}  // namespace

UniformSeries simulate_sde(const SdeParams& params, double duration, double dt_out, std::uint64_t seed,
                           const SdeControls& controls) {
    params.validate();
    require(std::isfinite(dt_out) && dt_out > 0.0, "simulate_sde: dt_out must be > 0");
    require(std::isfinite(duration) && duration >= 100.0 * dt_out,
            "simulate_sde: duration must be at least 100 * dt_out");
    const auto n = static_cast<std::size_t>(std::llround(duration / dt_out));

    RandomSource rng(seed);
    Integrator walker(params, rng, controls);
    std::vector<double> out(n);
    double x = params.x0;
    for (std::size_t i = 0; i < n; ++i) {
        x = walker.advance(x, dt_out);
        out[i] = x;
    }
    return {dt_out, dt_out, std::move(out)};
}

double stationary_pdf_theory(const SdeParams& params, double x) {
    params.validate();
    require(x >= params.x_min && x <= params.x_max, "stationary_pdf_theory: x outside support");
    const double one_minus = 1.0 - params.lambda;
    double norm;
    if (std::abs(one_minus) < 1e-12) {
        norm = 1.0 / std::log(params.x_max / params.x_min);
    } else {
        norm = one_minus / (std::pow(params.x_max, one_minus) - std::pow(params.x_min, one_minus));
    }
    return norm * std::pow(x, -params.lambda);
}

SpectralExponents psd_exponent_theory(const SdeParams& params) {
    require(params.eta > 1.0, "psd_exponent_theory: eta must be > 1");
    const double beta = 1.0 + (params.lambda - 3.0) / (2.0 * params.eta - 2.0);
    return {beta, 0.5 * (beta - 1.0)};
}

TransitionHistogramPair transition_scaling_samples(const SdeParams& params, double x_start, double a, double t,
                                                   std::size_t n, std::uint64_t seed,
                                                   const TransitionOptions& options) {
    params.validate();
    require(a > 0.0 && std::isfinite(a), "transition_scaling_samples: a must be > 0");
    require(t > 0.0 && std::isfinite(t), "transition_scaling_samples: t must be > 0");
    require(n >= 1, "transition_scaling_samples: need at least one path");
    require(x_start > params.x_min && x_start < params.x_max,
            "transition_scaling_samples: x_start must lie inside (x_min, x_max)");
    require(a * x_start > params.x_min && a * x_start < params.x_max,
            "transition_scaling_samples: a * x_start must lie inside (x_min, x_max)");

    const double g = std::isnan(options.time_exponent) ? 2.0 * (params.eta - 1.0) : options.time_exponent;

    TransitionHistogramPair out;
    out.scale_a = a;
    out.t = t;
    out.direct_horizon = std::pow(a, g) * t;
    out.direct_samples.resize(n);
    out.rescaled_samples.resize(n);

    std::size_t touched = 0;
    {
        RandomSource rng(derive_seed(seed, 0));
        Integrator walker(params, rng, {});
        for (std::size_t i = 0; i < n; ++i) {
            walker.reset_touch();
            out.direct_samples[i] = walker.advance(x_start, out.direct_horizon);
            touched += walker.touched_boundary() ? 1 : 0;
        }
    }
    {
        RandomSource rng(derive_seed(seed, 1));
        Integrator walker(params, rng, {});
        for (std::size_t i = 0; i < n; ++i) {
            walker.reset_touch();
            out.rescaled_samples[i] = walker.advance(a * x_start, t) / a;
            touched += walker.touched_boundary() ? 1 : 0;
        }
    }
    out.boundary_fraction = static_cast<double>(touched) / static_cast<double>(2 * n);
    out.boundary_warning = out.boundary_fraction > 0.01;

    const auto [d_lo, d_hi] = std::minmax_element(out.direct_samples.begin(), out.direct_samples.end());
    const auto [r_lo, r_hi] = std::minmax_element(out.rescaled_samples.begin(), out.rescaled_samples.end());
    const double lo = std::min(*d_lo, *r_lo);
    const double hi = std::max(*d_hi, *r_hi);
    out.direct = log_histogram(out.direct_samples, lo, hi, options.bins_per_decade);
    out.rescaled = log_histogram(out.rescaled_samples, lo, hi, options.bins_per_decade);
    return out;
}

ModelReturns generate_model_returns(const SdeParams& sde, const ReturnModelParams& model, double duration,
                                    std::uint64_t seed) {
    model.validate();
    UniformSeries driver = simulate_sde(sde, duration, model.delta, seed);

    RandomSource noise(derive_seed(seed, 1));
    const auto x = driver.values();
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = (1.0 + model.a0 * x[i]) * noise.gaussian();

    double b0 = model.b0;
    if (model.normalize) b0 = 1.0 / sample_std(r);
    for (double& v : r) v *= b0;
    UniformSeries returns(driver.t0(), driver.dt(), std::move(r));
    return {std::move(returns), std::move(driver), b0};
}

}  // namespace burstlab
