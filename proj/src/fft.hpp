#pragma once

// Thin RAII layer over FFTW. Plans are created with FFTW_ESTIMATE (no
// timing-dependent planning, so results are reproducible run to run).
// Planner calls are serialized; executing distinct plans is thread-safe.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>

namespace burstlab::detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

struct FftwPlanDestroy {
    void operator()(fftw_plan p) const noexcept {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(p);
    }
};

using PlanHandle = std::unique_ptr<std::remove_pointer_t<fftw_plan>, FftwPlanDestroy>;

/// Real-to-half-complex forward transform of fixed length n.
class RealFft {
public:
    explicit RealFft(std::size_t n)
        : n_(n),
          in_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
          out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
        if (!in_ || !out_) throw std::bad_alloc();
        std::lock_guard lock(fftw_planner_mutex());
        plan_.reset(fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.get(), out_.get(), FFTW_ESTIMATE));
        if (!plan_) throw std::bad_alloc();
    }

    std::size_t size() const noexcept { return n_; }
    std::span<double> input() noexcept { return {in_.get(), n_}; }
    void execute() { fftw_execute(plan_.get()); }
    std::complex<double> output(std::size_t k) const noexcept { return {out_.get()[k][0], out_.get()[k][1]}; }

private:
    std::size_t n_;
    std::unique_ptr<double, FftwFree> in_;
    std::unique_ptr<fftw_complex, FftwFree> out_;
    PlanHandle plan_;
};

/// In-place complex forward transform of fixed length n.
class ComplexFft {
public:
    explicit ComplexFft(std::size_t n)
        : n_(n), data_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
        if (!data_) throw std::bad_alloc();
        std::lock_guard lock(fftw_planner_mutex());
        plan_.reset(fftw_plan_dft_1d(static_cast<int>(n), data_.get(), data_.get(), FFTW_FORWARD, FFTW_ESTIMATE));
        if (!plan_) throw std::bad_alloc();
    }

    std::size_t size() const noexcept { return n_; }
    void set(std::size_t k, std::complex<double> v) noexcept {
        data_.get()[k][0] = v.real();
        data_.get()[k][1] = v.imag();
    }
    std::complex<double> get(std::size_t k) const noexcept { return {data_.get()[k][0], data_.get()[k][1]}; }
    void execute() { fftw_execute(plan_.get()); }

private:
    std::size_t n_;
    std::unique_ptr<fftw_complex, FftwFree> data_;
    PlanHandle plan_;
};

}  // namespace burstlab::detail
