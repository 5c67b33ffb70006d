#pragma once

// Pseudo-spectral viscous Burgers on [0, 2 pi) with modes -K..K on 2K + 1
// points, the spectral cut-off filter and the spectral commutator
//
//   tau^K(u) = cutoff_K(r^{K_h}(u)) - r^K(cutoff_K(u)),
//   r^K(u)   = 1/2 DFT_K(IDFT_K(u^theta)^2) - nu i k u,
//
// where u^theta keeps only |k| <= theta (the two-thirds rule for theta = 2K/3).

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "dles/fft.hpp"
#include "dles/simulate.hpp"
#include "dles/spectrum.hpp"

namespace dles {

namespace detail {

/// Shared 1D real transforms; plans are immutable once made.
inline const RealFft& rfft_1d(std::size_t n) {
    static std::mutex m;
    static std::map<std::size_t, std::unique_ptr<RealFft>> cache;
    std::lock_guard lock(m);
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, std::make_unique<RealFft>(std::vector<int>{static_cast<int>(n)})).first;
    }
    return *it->second;
}

} // namespace detail

/// Fourier coefficients u_hat(k), k = -K..K, of a real field.
class SpectralField {
  public:
    SpectralField() = default;
    explicit SpectralField(std::size_t band) : band_(band), c_(2 * band + 1, 0.0) {}

    /// Builds the Hermitian field from the coefficients of k = 0..K.
    static SpectralField from_modes(const std::vector<std::complex<double>>& nonneg) {
        if (nonneg.empty()) {
            throw Error("SpectralField: no modes");
        }
        SpectralField f(nonneg.size() - 1);
        f[0] = nonneg[0].real();
        for (std::size_t k = 1; k < nonneg.size(); ++k) {
            f.set_pair(static_cast<long>(k), nonneg[k]);
        }
        return f;
    }

    /// Forward transform of samples u_j at x_j = 2 pi j / (2K + 1).
    static SpectralField from_physical(const std::vector<double>& u) {
        if (u.size() % 2 == 0 || u.size() < 3) {
            throw Error("SpectralField: need an odd number (>= 3) of samples");
        }
        const RealFft& fft = detail::rfft_1d(u.size());
        std::vector<std::complex<double>> h(fft.complex_size());
        fft.forward(u.data(), h.data());
        const double inv = 1.0 / static_cast<double>(u.size());
        SpectralField f((u.size() - 1) / 2);
        f[0] = h[0].real() * inv;
        for (std::size_t k = 1; k < h.size(); ++k) {
            f.set_pair(static_cast<long>(k), h[k] * inv);
        }
        return f;
    }

    /// u_j = sum_k u_hat(k) exp(i k x_j) on the 2K + 1 points.
    std::vector<double> to_physical() const {
        const std::size_t n = points();
        const RealFft& fft = detail::rfft_1d(n);
        std::vector<std::complex<double>> h(band_ + 1);
        for (std::size_t k = 0; k <= band_; ++k) {
            h[k] = (*this)[static_cast<long>(k)];
        }
        h[0] = h[0].real();
        std::vector<double> u(n);
        fft.inverse(h.data(), u.data());
        return u;
    }

    std::size_t band() const { return band_; }
    std::size_t points() const { return 2 * band_ + 1; }

    std::complex<double>& operator[](long k) { return c_[index(k)]; }
    const std::complex<double>& operator[](long k) const { return c_[index(k)]; }

    void set_pair(long k, std::complex<double> z) {
        (*this)[k] = z;
        (*this)[-k] = std::conj(z);
    }

    /// Largest |u(-k) - conj(u(k))| and |Im u(0)|.
    double hermitian_defect() const {
        double d = std::abs((*this)[0].imag());
        for (long k = 1; k <= static_cast<long>(band_); ++k) {
            d = std::max(d, std::abs((*this)[-k] - std::conj((*this)[k])));
        }
        return d;
    }

    SpectralField& operator+=(const SpectralField& o) {
        check(o);
        for (std::size_t i = 0; i < c_.size(); ++i) {
            c_[i] += o.c_[i];
        }
        return *this;
    }
    SpectralField& operator-=(const SpectralField& o) {
        check(o);
        for (std::size_t i = 0; i < c_.size(); ++i) {
            c_[i] -= o.c_[i];
        }
        return *this;
    }
    SpectralField& operator*=(double s) {
        for (auto& z : c_) {
            z *= s;
        }
        return *this;
    }
    SpectralField& axpy(double s, const SpectralField& o) {
        check(o);
        for (std::size_t i = 0; i < c_.size(); ++i) {
            c_[i] += s * o.c_[i];
        }
        return *this;
    }

    bool all_finite() const {
        for (const auto& z : c_) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                return false;
            }
        }
        return true;
    }

  private:
    std::size_t index(long k) const {
        if (k < -static_cast<long>(band_) || k > static_cast<long>(band_)) {
            throw Error("SpectralField: mode " + std::to_string(k) + " outside band " + std::to_string(band_));
        }
        return static_cast<std::size_t>(k + static_cast<long>(band_));
    }
    void check(const SpectralField& o) const {
        if (o.band_ != band_) {
            throw Error("SpectralField: band mismatch");
        }
    }

    std::size_t band_ = 0;
    std::vector<std::complex<double>> c_;
};

/// Keeps |k| <= K. The result has band min(K, u.band()).
inline SpectralField cutoff_filter(const SpectralField& u, std::size_t k) {
    const std::size_t b = std::min(k, u.band());
    SpectralField out(b);
    for (long m = -static_cast<long>(b); m <= static_cast<long>(b); ++m) {
        out[m] = u[m];
    }
    return out;
}

/// Same band, modes with |k| > theta set to zero.
inline SpectralField truncate(const SpectralField& u, std::size_t theta) {
    SpectralField out(u.band());
    const long t = static_cast<long>(std::min(theta, u.band()));
    for (long m = -t; m <= t; ++m) {
        out[m] = u[m];
    }
    return out;
}

inline std::size_t default_theta(std::size_t band) { return 2 * band / 3; }

/// r^K(u) with K = u.band().
inline SpectralField spectral_flux(const SpectralField& u, double nu, std::optional<std::size_t> theta = std::nullopt) {
    const std::size_t t = theta.value_or(default_theta(u.band()));
    if (t > u.band()) {
        throw Error("spectral_flux: dealiasing band " + std::to_string(t) + " exceeds the resolved band " +
                    std::to_string(u.band()));
    }
    std::vector<double> p = truncate(u, t).to_physical();
    for (auto& x : p) {
        x = 0.5 * x * x;
    }
    SpectralField r = SpectralField::from_physical(p);
    for (long k = -static_cast<long>(u.band()); k <= static_cast<long>(u.band()); ++k) {
        r[k] -= nu * std::complex<double>(0.0, static_cast<double>(k)) * u[k];
    }
    return r;
}

/// i k f.
inline SpectralField spectral_derivative(const SpectralField& f) {
    SpectralField out(f.band());
    for (long k = -static_cast<long>(f.band()); k <= static_cast<long>(f.band()); ++k) {
        out[k] = std::complex<double>(0.0, static_cast<double>(k)) * f[k];
    }
    return out;
}

/// du/dt = -i k r^K(u).
inline SpectralField spectral_rhs(const SpectralField& u, double nu, std::optional<std::size_t> theta = std::nullopt) {
    SpectralField d = spectral_derivative(spectral_flux(u, nu, theta));
    d *= -1.0;
    return d;
}

struct SpectralBands {
    std::size_t dns;                         ///< K_h
    std::size_t les;                         ///< K
    std::optional<std::size_t> theta_dns{};  ///< defaults to 2 K_h / 3
    std::optional<std::size_t> theta_les{};  ///< defaults to 2 K / 3
};

/// tau^K(u) for a DNS field of band K_h.
inline SpectralField spectral_sfs(const SpectralField& u, std::size_t k, double nu,
                                  std::optional<std::size_t> theta_les = std::nullopt,
                                  std::optional<std::size_t> theta_dns = std::nullopt) {
    if (k > u.band()) {
        throw Error("spectral_sfs: LES band exceeds the DNS band");
    }
    SpectralField tau = cutoff_filter(spectral_flux(u, nu, theta_dns), k);
    tau -= spectral_flux(cutoff_filter(u, k), nu, theta_les);
    return tau;
}

struct SpectralLes {
    std::size_t band;
    bool closed; ///< true: m = tau^K; false: no model
    std::optional<std::size_t> theta;
    TimeState<SpectralField> state;
};

inline SpectralLes make_spectral_les(std::size_t band, bool closed, const TimeState<SpectralField>& dns,
                                     std::optional<std::size_t> theta = std::nullopt) {
    return {band, closed, theta, {dns.t, dns.step, cutoff_filter(dns.state, band)}};
}

/// Forward Euler for the DNS and every LES with one shared step:
///   u <- u - dt i k r^{K_h}(u),  w <- w - dt i k (r^K(w) + m(u)).
inline void euler_step_spectral(TimeState<SpectralField>& dns, std::vector<SpectralLes>& les, double nu, double dt,
                                std::optional<std::size_t> theta_dns = std::nullopt) {
    const SpectralField rh = spectral_flux(dns.state, nu, theta_dns);
    for (auto& l : les) {
        if (l.state.t != dns.t || l.state.step != dns.step) {
            throw Error("euler_step_spectral: DNS and LES states are not at the same time");
        }
        SpectralField flux = spectral_flux(l.state.state, nu, l.theta);
        if (l.closed) {
            flux += cutoff_filter(rh, l.band);
            flux -= spectral_flux(cutoff_filter(dns.state, l.band), nu, l.theta);
        }
        l.state.state.axpy(-dt, spectral_derivative(flux));
    }
    dns.state.axpy(-dt, spectral_derivative(rh));
    dns.t += dt;
    ++dns.step;
    if (!dns.state.all_finite()) {
        throw NumericalError("spectral DNS", dns.step);
    }
    for (auto& l : les) {
        l.state.t = dns.t;
        l.state.step = dns.step;
        if (!l.state.state.all_finite()) {
            throw NumericalError("spectral LES", dns.step);
        }
    }
}

/// Stable forward Euler step for the spectral DNS: besides the grid CFL
/// bounds, an Euler step of i k u + nu k^2 needs dt <= 2 nu / max|u|^2 and
/// dt <= 2 / (nu K^2).
inline double cfl_dt_spectral(const SpectralField& u, double nu, double c = 0.4) {
    const auto phys = u.to_physical();
    double vmax = 0.0;
    for (double x : phys) {
        vmax = std::max(vmax, std::abs(x));
    }
    const double kmax = static_cast<double>(u.band());
    double dt = 1.0 / (nu * kmax * kmax);
    if (vmax > 0.0) {
        dt = std::min({dt, 1.0 / (kmax * vmax), nu / (vmax * vmax)});
    }
    return c * dt;
}

/// ||a - b|| / ||b|| over the coefficients (equal to the physical L2 ratio).
inline double relative_error(const SpectralField& a, const SpectralField& b) {
    if (a.band() != b.band()) {
        throw Error("relative_error: band mismatch");
    }
    double num = 0.0, den = 0.0;
    for (long k = -static_cast<long>(a.band()); k <= static_cast<long>(a.band()); ++k) {
        num += std::norm(a[k] - b[k]);
        den += std::norm(b[k]);
    }
    return std::sqrt(num / den);
}

/// E(kappa) = 1/2 (|u(kappa)|^2 + |u(-kappa)|^2), E(0) = 1/2 |u(0)|^2.
inline Spectrum energy_spectrum(const SpectralField& u) {
    Spectrum e(u.band() + 1, 0.0);
    e[0] = 0.5 * std::norm(u[0]);
    for (long k = 1; k <= static_cast<long>(u.band()); ++k) {
        e[static_cast<std::size_t>(k)] = 0.5 * (std::norm(u[k]) + std::norm(u[-k]));
    }
    return e;
}

/// Burgers initial condition as a spectral field of band K.
inline SpectralField spectral_burgers_init(std::size_t band, RngStream& rng, const BurgersInitOptions& opt = {}) {
    return SpectralField::from_modes(burgers_init_modes(2 * band + 1, rng, opt));
}

} // namespace dles
