#include "burstlab/fbm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "burstlab/error.hpp"
#include "burstlab/rng.hpp"
#include "fft.hpp"

namespace burstlab {

using detail::require;

void FbmParams::validate() const {
    require(hurst > 0.0 && hurst < 1.0, "FbmParams: hurst must lie in (0, 1)");
    require(n >= 2, "FbmParams: n must be >= 2");
    require(std::isfinite(dt) && dt > 0.0, "FbmParams: dt must be > 0");
    require(std::isfinite(sigma) && sigma > 0.0, "FbmParams: sigma must be > 0");
}

double fgn_autocovariance(double hurst, double sigma, std::size_t lag) {
    const double k = static_cast<double>(lag);
    const double two_h = 2.0 * hurst;
    const double below = lag == 0 ? 1.0 : std::pow(k - 1.0, two_h);  // |k-1| at k = 0 is 1
    const double mid = lag == 0 ? 0.0 : std::pow(k, two_h);
    return 0.5 * sigma * sigma * (std::pow(k + 1.0, two_h) - 2.0 * mid + below);
}

const char* to_string(FgnMethod method) noexcept {
    switch (method) {
        case FgnMethod::automatic: return "automatic";
        case FgnMethod::circulant_embedding: return "circulant-embedding";
        case FgnMethod::levinson: return "levinson";
    }
    return "unknown";
}

namespace {

// Eigenvalues of the 2n circulant embedding of the n x n Toeplitz covariance.
std::vector<double> embedding_spectrum(const FbmParams& p) {
    const std::size_t m = 2 * p.n;
    detail::RealFft fft(m);
    auto row = fft.input();
    for (std::size_t k = 0; k <= p.n; ++k) row[k] = fgn_autocovariance(p.hurst, p.sigma, k);
    for (std::size_t k = p.n + 1; k < m; ++k) row[k] = row[m - k];
    fft.execute();
    std::vector<double> eig(m);
    for (std::size_t k = 0; k < m; ++k) eig[k] = fft.output(k <= m / 2 ? k : m - k).real();
    return eig;
}

bool embedding_is_valid(std::vector<double>& eig) {
    const double largest = *std::max_element(eig.begin(), eig.end());
    for (double& e : eig) {
        if (e < -1e-10 * largest) return false;
        e = std::max(e, 0.0);
    }
    return true;
}

std::vector<UniformSeries> circulant_paths(const FbmParams& p, const std::vector<double>& eig, std::size_t paths,
                                           std::uint64_t seed) {
    const std::size_t m = eig.size();
    std::vector<double> amplitude(m);
    for (std::size_t k = 0; k < m; ++k) amplitude[k] = std::sqrt(eig[k] / static_cast<double>(m));

    detail::ComplexFft fft(m);
    std::vector<UniformSeries> out;
    out.reserve(paths);
    for (std::size_t draw = 0; out.size() < paths; ++draw) {
        RandomSource rng(derive_seed(seed, draw));
        for (std::size_t k = 0; k < m; ++k) {
            const double re = rng.gaussian();
            const double im = rng.gaussian();
            fft.set(k, {amplitude[k] * re, amplitude[k] * im});
        }
        fft.execute();
        std::vector<double> real(p.n), imag(p.n);
        for (std::size_t i = 0; i < p.n; ++i) {
            const auto z = fft.get(i);
            real[i] = z.real();
            imag[i] = z.imag();
        }
        out.emplace_back(p.dt, p.dt, std::move(real));
        if (out.size() < paths) out.emplace_back(p.dt, p.dt, std::move(imag));
    }
    return out;
}

// Durbin-Levinson: X_i = sum_j phi_ij X_{i-j} + sqrt(v_i) Z_i. All paths
// advance in lockstep so only the current order's coefficients are kept.
std::vector<UniformSeries> levinson_paths(const FbmParams& p, std::size_t paths, std::uint64_t seed) {
    const std::size_t n = p.n;
    std::vector<double> gamma(n);
    for (std::size_t k = 0; k < n; ++k) gamma[k] = fgn_autocovariance(p.hurst, p.sigma, k);

    std::vector<RandomSource> rngs;
    rngs.reserve(paths);
    for (std::size_t path = 0; path < paths; ++path) rngs.emplace_back(derive_seed(seed, path));
    std::vector<std::vector<double>> x(paths, std::vector<double>(n));

    std::vector<double> phi, next;
    phi.reserve(n);
    next.reserve(n);
    double var = gamma[0];
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            double num = gamma[i];
            for (std::size_t j = 1; j < i; ++j) num -= phi[j - 1] * gamma[i - j];
            const double reflection = num / var;
            next.resize(i);
            for (std::size_t j = 1; j < i; ++j) next[j - 1] = phi[j - 1] - reflection * phi[i - j - 1];
            next[i - 1] = reflection;
            phi.swap(next);
            var *= 1.0 - reflection * reflection;
        }
        const double sd = std::sqrt(std::max(var, 0.0));
        for (std::size_t path = 0; path < paths; ++path) {
            auto& xs = x[path];
            double mean = 0.0;
            for (std::size_t j = 1; j <= i; ++j) mean += phi[j - 1] * xs[i - j];
            xs[i] = mean + sd * rngs[path].gaussian();
        }
    }

    std::vector<UniformSeries> out;
    out.reserve(paths);
    for (auto& xs : x) out.emplace_back(p.dt, p.dt, std::move(xs));
    return out;
}

}  // namespace

FgnEnsemble simulate_fgn_ensemble(const FbmParams& params, std::size_t paths, std::uint64_t seed,
                                  const FgnOptions& options) {
    params.validate();
    require(paths >= 1, "simulate_fgn: need at least one path");
    if (params.n > options.max_samples) {
        throw ValidationError("simulate_fgn: n = " + std::to_string(params.n) + " exceeds the memory budget of " +
                              std::to_string(options.max_samples) + " samples");
    }

    if (options.method != FgnMethod::levinson) {
        auto eig = embedding_spectrum(params);
        if (embedding_is_valid(eig)) {
            return {circulant_paths(params, eig, paths, seed), FgnMethod::circulant_embedding};
        }
        if (options.method == FgnMethod::circulant_embedding) {
            throw NumericalError("simulate_fgn: circulant embedding has negative eigenvalues", 0);
        }
    }
    if (params.n > options.max_levinson_samples) {
        throw ValidationError("simulate_fgn: n = " + std::to_string(params.n) +
                              " too large for exact conditional generation (limit " +
                              std::to_string(options.max_levinson_samples) + ")");
    }
    return {levinson_paths(params, paths, seed), FgnMethod::levinson};
}

FgnSample simulate_fgn(const FbmParams& params, std::uint64_t seed, const FgnOptions& options) {
    auto ensemble = simulate_fgn_ensemble(params, 1, seed, options);
    return {std::move(ensemble.paths.front()), ensemble.method};
}

UniformSeries cumulative_sum(const UniformSeries& increments) {
    std::vector<double> out(increments.values().begin(), increments.values().end());
    for (std::size_t i = 1; i < out.size(); ++i) out[i] += out[i - 1];
    return {increments.t0(), increments.dt(), std::move(out)};
}

FgnSample simulate_fbm(const FbmParams& params, std::uint64_t seed, const FgnOptions& options) {
    auto fgn = simulate_fgn(params, seed, options);
    return {cumulative_sum(fgn.series), fgn.method};
}

FgnEnsemble simulate_fbm_ensemble(const FbmParams& params, std::size_t paths, std::uint64_t seed,
                                  const FgnOptions& options) {
    auto ensemble = simulate_fgn_ensemble(params, paths, seed, options);
    for (auto& path : ensemble.paths) path = cumulative_sum(path);
    return ensemble;
}

double fbm_passage_exponent_theory(double hurst) {
    require(hurst > 0.0 && hurst < 1.0, "fbm_passage_exponent_theory: hurst must lie in (0, 1)");
    return 2.0 - hurst;
}

}  // namespace burstlab
