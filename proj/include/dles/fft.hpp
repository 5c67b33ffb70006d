#pragma once

// Thin RAII wrappers over FFTW. Plans are created once (FFTW_ESTIMATE, so
// planning is deterministic) and executed through the new-array interface,
// which is reentrant. Transforms are unnormalized.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <vector>

#include "dles/grid.hpp"

namespace dles {

namespace detail {

// The FFTW planner is not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwPlan {
    fftw_plan plan = nullptr;

    FftwPlan() = default;
    explicit FftwPlan(fftw_plan p) : plan(p) {
        if (!plan) {
            throw Error("FFTW planning failed");
        }
    }
    FftwPlan(const FftwPlan&) = delete;
    FftwPlan& operator=(const FftwPlan&) = delete;
    FftwPlan(FftwPlan&& o) noexcept : plan(o.plan) { o.plan = nullptr; }
    FftwPlan& operator=(FftwPlan&& o) noexcept {
        std::swap(plan, o.plan);
        return *this;
    }
    ~FftwPlan() {
        if (plan) {
            std::lock_guard lock(fftw_planner_mutex());
            fftw_destroy_plan(plan);
        }
    }
};

} // namespace detail

/// Real-to-complex transform of a row-major array with the given dimensions.
/// The complex side has the last dimension halved: dims.back() / 2 + 1.
class RealFft {
  public:
    explicit RealFft(std::vector<int> dims) : dims_(std::move(dims)) {
        real_size_ = 1;
        for (int d : dims_) {
            real_size_ *= static_cast<std::size_t>(d);
        }
        complex_size_ = real_size_ / static_cast<std::size_t>(dims_.back()) *
                        static_cast<std::size_t>(dims_.back() / 2 + 1);
        std::lock_guard lock(detail::fftw_planner_mutex());
        double* r = fftw_alloc_real(real_size_);
        fftw_complex* c = fftw_alloc_complex(complex_size_);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd_.plan = fftw_plan_dft_r2c(static_cast<int>(dims_.size()), dims_.data(), r, c, flags);
        bwd_.plan = fftw_plan_dft_c2r(static_cast<int>(dims_.size()), dims_.data(), c, r, flags);
        fftw_free(r);
        fftw_free(c);
        if (!fwd_.plan || !bwd_.plan) {
            throw Error("RealFft: FFTW planning failed");
        }
    }

    std::size_t real_size() const { return real_size_; }
    std::size_t complex_size() const { return complex_size_; }
    const std::vector<int>& dims() const { return dims_; }

    void forward(const double* in, std::complex<double>* out) const {
        fftw_execute_dft_r2c(fwd_.plan, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
    }

    /// c2r overwrites its input, so the spectrum is copied first.
    void inverse(const std::complex<double>* in, double* out) const {
        std::vector<std::complex<double>> scratch(in, in + complex_size_);
        fftw_execute_dft_c2r(bwd_.plan, reinterpret_cast<fftw_complex*>(scratch.data()), out);
    }

    std::vector<std::complex<double>> forward(const std::vector<double>& in) const {
        std::vector<std::complex<double>> out(complex_size_);
        forward(in.data(), out.data());
        return out;
    }

  private:
    std::vector<int> dims_;
    std::size_t real_size_ = 0;
    std::size_t complex_size_ = 0;
    detail::FftwPlan fwd_;
    detail::FftwPlan bwd_;
};

/// Complex 1D transform of length n. forward uses exp(-i...), backward exp(+i...).
class ComplexFft {
  public:
    explicit ComplexFft(int n) : n_(n) {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_complex* a = fftw_alloc_complex(static_cast<std::size_t>(n));
        fftw_complex* b = fftw_alloc_complex(static_cast<std::size_t>(n));
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd_.plan = fftw_plan_dft_1d(n, a, b, FFTW_FORWARD, flags);
        bwd_.plan = fftw_plan_dft_1d(n, a, b, FFTW_BACKWARD, flags);
        fftw_free(a);
        fftw_free(b);
        if (!fwd_.plan || !bwd_.plan) {
            throw Error("ComplexFft: FFTW planning failed");
        }
    }

    int size() const { return n_; }

    void forward(const std::complex<double>* in, std::complex<double>* out) const {
        fftw_execute_dft(fwd_.plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }
    void backward(const std::complex<double>* in, std::complex<double>* out) const {
        fftw_execute_dft(bwd_.plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }

  private:
    int n_;
    detail::FftwPlan fwd_;
    detail::FftwPlan bwd_;
};

/// Signed integer wavenumber of DFT index m on an n-point axis.
inline long signed_wavenumber(std::size_t m, std::size_t n) {
    return m <= n / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n);
}

} // namespace dles
