#pragma once

// Shell-binned kinetic energy spectra.
//
// Transforms are normalized by the number of points, so a mode
// A cos(2 pi m x / L) has coefficients A/2 at +m and -m. Shell kappa collects
// integer mode vectors with kappa <= |m| < kappa + 1 and
//
//   E(kappa) = 1/2 sum_{m in shell} |u_hat(m)|^2,
//
// which makes sum_kappa E(kappa) = 1/2 <u . u> (the point average).

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "dles/fft.hpp"
#include "dles/grid.hpp"

namespace dles {

/// E[kappa] for kappa = 0, 1, ..., size() - 1.
using Spectrum = std::vector<double>;

/// Largest shell index on an n-point grid in dim dimensions.
inline std::size_t max_shell(std::size_t n, int dim) {
    const double kmax = static_cast<double>(n / 2);
    return static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(dim)) * kmax));
}

inline std::size_t shell_of(double magnitude) { return static_cast<std::size_t>(std::floor(magnitude)); }

/// Visits every entry of a 3D real-to-complex spectrum with its mode vector
/// and the number of full-spectrum modes it stands for (1 or 2).
inline void for_each_rfft_mode(std::size_t n,
                               const std::function<void(std::size_t lin, const std::array<long, 3>& k, double weight)>& f) {
    const std::size_t nh = n / 2 + 1;
    std::size_t lin = 0;
    for (std::size_t a = 0; a < n; ++a) {
        const long ka = signed_wavenumber(a, n);
        for (std::size_t b = 0; b < n; ++b) {
            const long kb = signed_wavenumber(b, n);
            for (std::size_t c = 0; c < nh; ++c, ++lin) {
                const bool self = c == 0 || (n % 2 == 0 && c == n / 2);
                f(lin, {ka, kb, static_cast<long>(c)}, self ? 1.0 : 2.0);
            }
        }
    }
}

inline double mode_norm(const std::array<long, 3>& k) {
    return std::sqrt(static_cast<double>(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]));
}

/// Normalized r2c transform of a 3D field.
inline std::vector<std::complex<double>> rfft_normalized(const RealFft& fft, const Field3D& u) {
    std::vector<std::complex<double>> out(fft.complex_size());
    fft.forward(u.data(), out.data());
    const double inv = 1.0 / static_cast<double>(fft.real_size());
    for (auto& z : out) {
        z *= inv;
    }
    return out;
}

inline Spectrum energy_spectrum(const Field1D& u) {
    const std::size_t n = u.size();
    const RealFft fft({static_cast<int>(n)});
    std::vector<std::complex<double>> uh(fft.complex_size());
    fft.forward(u.data(), uh.data());
    Spectrum e(n / 2 + 1, 0.0);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t m = 0; m < uh.size(); ++m) {
        const double a = std::norm(uh[m] * inv);
        const bool self = m == 0 || (n % 2 == 0 && m == n / 2);
        e[m] += 0.5 * (self ? 1.0 : 2.0) * a;
    }
    return e;
}

inline Spectrum energy_spectrum(const VectorField& v) {
    const std::size_t n = v.n_points();
    const RealFft fft({static_cast<int>(n), static_cast<int>(n), static_cast<int>(n)});
    Spectrum e(max_shell(n, 3) + 1, 0.0);
    for (int i = 0; i < 3; ++i) {
        const auto uh = rfft_normalized(fft, v[i]);
        for_each_rfft_mode(n, [&](std::size_t lin, const std::array<long, 3>& k, double w) {
            e[shell_of(mode_norm(k))] += 0.5 * w * std::norm(uh[lin]);
        });
    }
    return e;
}

/// 1/2 <u u>, the point-averaged kinetic energy.
inline double kinetic_energy(const Field1D& u) {
    double s = 0.0;
    for (double x : u.values()) {
        s += x * x;
    }
    return 0.5 * s / static_cast<double>(u.size());
}

inline double kinetic_energy(const VectorField& v) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (double x : v[i].values()) {
            s += x * x;
        }
    }
    return 0.5 * s / static_cast<double>(v[0].size());
}

inline double total(const Spectrum& e) {
    double s = 0.0;
    for (double x : e) {
        s += x;
    }
    return s;
}

} // namespace dles
