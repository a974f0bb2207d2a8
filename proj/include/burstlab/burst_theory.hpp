#pragma once

// Burst-duration law of the nonlinear SDE. Under z = x^-(eta-1) / (eta-1)
// the SDE becomes a Bessel process of index
//
//     nu = (lambda - 2 eta + 1) / (2 (eta - 1)),
//
// and the time spent above a threshold h has density ~ T^-3/2 for short
// bursts and ~ (1/T) exp(-mu T) for long ones, with
//
//     mu = (eta - 1)^2 h^(2(eta-1)) j_{nu,1}^2 / 2,   t_crossover = 1 / mu,
//
// where j_{nu,1} is the first positive zero of the Bessel function J_nu.

namespace burstlab {

/// Bessel function of the first kind J_nu(x) for nu >= -1/2 and x > 0,
/// summed from its power series in extended precision. Intended for the
/// moderate arguments met when locating first zeros; cancellation in the
/// series limits absolute accuracy to about 1e-12 once x exceeds 2 nu + 20.
double bessel_j(double nu, double x);

/// (lambda - 2 eta + 1) / (2 (eta - 1)); requires eta > 1.
double bessel_index(double eta, double lambda);

/// First positive zero of J_nu, nu in [-1/2, 25], to about 1e-13 absolute.
double bessel_first_zero(double nu);

struct BurstTheoryParams {
    double eta;
    double lambda;
    double h;
    double nu;
    double j_nu_1;
    double t_crossover;

    /// Exponential tail rate mu = 1 / t_crossover.
    double decay_rate() const noexcept { return 1.0 / t_crossover; }
};

BurstTheoryParams burst_theory_params(double eta, double lambda, double h);

/// Unnormalized asymptotic shapes. `value` follows the power-law branch for
/// T < t_crossover and the exponential branch beyond; both branches are always
/// reported so the mismatch at the seam is visible.
struct BurstPdfValue {
    double power_law;    // T^-3/2
    double exponential;  // (1/T) exp(-mu T)
    bool long_branch;    // T >= t_crossover
    double value;
};

BurstPdfValue burst_pdf_theory(const BurstTheoryParams& params, double T);

}  // namespace burstlab
