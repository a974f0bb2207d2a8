#include "burstlab/burst_theory.hpp"

#include <algorithm>
#include <cmath>

#include "burstlab/error.hpp"

namespace burstlab {

using detail::require;

double bessel_j(double nu, double x) {
    require(nu >= -0.5, "bessel_j: order must be >= -1/2");
    require(std::isfinite(x) && x > 0.0, "bessel_j: argument must be > 0");
    using ld = long double;
    const ld half = static_cast<ld>(x) / 2;
    const ld q = -half * half;
    const ld v = nu;
    // first term (x/2)^nu / Gamma(nu + 1)
    ld term = std::exp(v * std::log(half) - std::lgamma(v + 1));
    ld sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<ld>(k) * (static_cast<ld>(k) + v));
        sum += term;
        if (std::fabs(term) <= 1e-21L * std::fabs(sum) && static_cast<ld>(k) > half) break;
    }
    return static_cast<double>(sum);
}

double bessel_index(double eta, double lambda) {
    require(std::isfinite(eta) && eta > 1.0, "bessel_index: eta must be > 1");
    require(std::isfinite(lambda), "bessel_index: lambda must be finite");
    return (lambda - 2.0 * eta + 1.0) / (2.0 * (eta - 1.0));
}

double bessel_first_zero(double nu) {
    require(nu >= -0.5 && nu <= 25.0, "bessel_first_zero: order must lie in [-1/2, 25]");
    // J_nu > 0 on (0, j_{nu,1}) and j_{nu,1} > max(nu, pi/2) over this range.
    const double start = std::max(nu, 1.0);
    const double guess = nu + 1.8557 * std::cbrt(std::max(nu, 0.0)) + 1.5;
    const double step = 0.05;
    double lo = start;
    double hi = lo + step;
    while (bessel_j(nu, hi) > 0.0) {
        lo = hi;
        hi += step;
        if (hi > guess + 10.0) throw NumericalError("bessel_first_zero: no sign change found", 0);
    }
    for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (bessel_j(nu, mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

BurstTheoryParams burst_theory_params(double eta, double lambda, double h) {
    require(std::isfinite(h) && h > 0.0, "burst_theory_params: threshold must be > 0");
    BurstTheoryParams p{};
    p.eta = eta;
    p.lambda = lambda;
    p.h = h;
    p.nu = bessel_index(eta, lambda);
    p.j_nu_1 = bessel_first_zero(p.nu);
    const double e1 = eta - 1.0;
    p.t_crossover = 2.0 / (e1 * e1 * std::pow(h, 2.0 * e1) * p.j_nu_1 * p.j_nu_1);
    return p;
}

BurstPdfValue burst_pdf_theory(const BurstTheoryParams& params, double T) {
    require(std::isfinite(T) && T > 0.0, "burst_pdf_theory: T must be > 0");
    BurstPdfValue out{};
    out.power_law = std::pow(T, -1.5);
    out.exponential = std::exp(-params.decay_rate() * T) / T;
    out.long_branch = T >= params.t_crossover;
    out.value = out.long_branch ? out.exponential : out.power_law;
    return out;
}

}  // namespace burstlab
