#pragma once

// Post-processing: Kolmogorov reference, sub-filter dissipation, kernel
// density estimates, turbulence statistics, relative errors and Q.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "dles/closures.hpp"
#include "dles/spectrum.hpp"

namespace dles {

/// kappa -> C eps^(2/3) kappa^(-5/3).
inline std::function<double(double)> kolmogorov_reference(double eps, double c = 0.5) {
    return [eps, c](double kappa) { return c * std::cbrt(eps * eps) * std::pow(kappa, -5.0 / 3.0); };
}

/// D = m delta^H w at coarse faces. With `normalized`, D / H^2 is returned.
inline Field1D dissipation_coefficient(const Field1D& m, const Field1D& w, bool normalized = false) {
    const Field1D dw = diff_1d(w);
    if (!m.same_layout(dw)) {
        throw Error("dissipation_coefficient: closure and velocity gradient are not collocated");
    }
    Field1D d = dw;
    const double h = w.spacing(0);
    const double s = normalized ? 1.0 / (h * h) : 1.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = s * m[i] * dw[i];
    }
    return d;
}

/// D = sum_ij m_ij delta^H_j w_i at cell centers. Each product is formed where
/// both factors live (center or edge(i, j)) and then moved to the centers.
inline Field3D dissipation_coefficient(const TensorField& m, const VectorField& w) {
    Field3D out(w.grid(), Stagger::center());
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            Field3D prod = diff(w[i], j);
            if (!prod.same_layout(m(i, j))) {
                throw Error("dissipation_coefficient: closure and velocity gradient are not collocated");
            }
            for (std::size_t k = 0; k < prod.size(); ++k) {
                prod[k] *= m(i, j)[k];
            }
            out += collocate_to_center(prod);
        }
    }
    return out;
}

struct Kde {
    std::vector<double> x;
    std::vector<double> density;
    double bandwidth = 0.0;

    /// Densities below this floor are not shown in plots.
    static constexpr double floor = 1e-4;
    bool above_floor(std::size_t i) const { return density[i] >= floor; }
};

/// Silverman's rule 0.9 min(sd, IQR / 1.34) n^(-1/5).
inline double silverman_bandwidth(std::vector<double> s) {
    const auto n = static_cast<double>(s.size());
    double mean = 0.0;
    for (double x : s) {
        mean += x;
    }
    mean /= n;
    double var = 0.0;
    for (double x : s) {
        var += (x - mean) * (x - mean);
    }
    const double sd = s.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    std::sort(s.begin(), s.end());
    auto quantile = [&](double q) {
        const double pos = q * (n - 1.0);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, s.size() - 1);
        return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    double spread = sd;
    if (iqr > 0.0) {
        spread = std::min(sd, iqr / 1.34);
    }
    return 0.9 * spread * std::pow(n, -0.2);
}

/// Gaussian kernel density estimate on `points` uniform points spanning the
/// samples plus three bandwidths on each side.
inline Kde kde(const std::vector<double>& samples, std::optional<double> bandwidth = std::nullopt,
               std::size_t points = 512) {
    if (samples.empty()) {
        throw Error("kde: no samples");
    }
    if (points < 2) {
        throw Error("kde: need at least two evaluation points");
    }
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *lo_it, hi = *hi_it;
    double bw = bandwidth ? *bandwidth : silverman_bandwidth(samples);
    if (!(bw > 0.0)) {
        if (bandwidth) {
            throw Error("kde: bandwidth must be positive");
        }
        // identical samples: fall back to a narrow kernel around the value
        bw = 1e-3 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    }
    Kde out;
    out.bandwidth = bw;
    out.x.resize(points);
    out.density.assign(points, 0.0);
    const double a = lo - 3.0 * bw, b = hi + 3.0 * bw;
    for (std::size_t i = 0; i < points; ++i) {
        out.x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    const double norm = 1.0 / (static_cast<double>(samples.size()) * bw * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t i = 0; i < points; ++i) {
        double s = 0.0;
        for (double y : samples) {
            const double z = (out.x[i] - y) / bw;
            s += std::exp(-0.5 * z * z);
        }
        out.density[i] = s * norm;
    }
    return out;
}

struct TurbStats {
    double v_rms = 0.0;
    double eps = 0.0;
    double l_int = 0.0;
    double l_tay = 0.0;
    double t_int = 0.0;
    double t_tay = 0.0;
    double re_int = 0.0;
    double re_tay = 0.0;
    /// False when eps or v_rms vanish and the derived scales are undefined.
    bool defined = false;
};

/// Domain-averaged statistics: v_rms = <v_i v_i>^(1/2),
/// eps = nu <(delta_j v_i)(delta_j v_i)>, l_int = v_rms^3 / eps,
/// l_tay = (nu / eps)^(1/2) v_rms, t = l / v_rms, Re = v_rms l / nu.
inline TurbStats turbulence_stats(const VectorField& v, double nu) {
    TurbStats s;
    const auto npts = static_cast<double>(v[0].size());
    double vv = 0.0, gg = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (double x : v[i].values()) {
            vv += x * x;
        }
        for (int j = 0; j < 3; ++j) {
            const Field3D d = diff(v[i], j);
            for (double x : d.values()) {
                gg += x * x;
            }
        }
    }
    s.v_rms = std::sqrt(vv / npts);
    s.eps = nu * gg / npts;
    if (!(s.eps > 0.0) || !(s.v_rms > 0.0)) {
        return s;
    }
    s.defined = true;
    s.l_int = s.v_rms * s.v_rms * s.v_rms / s.eps;
    s.l_tay = std::sqrt(nu / s.eps) * s.v_rms;
    s.t_int = s.l_int / s.v_rms;
    s.t_tay = s.l_tay / s.v_rms;
    s.re_int = s.v_rms * s.l_int / nu;
    s.re_tay = s.v_rms * s.l_tay / nu;
    return s;
}

/// ||w - ref|| / ||ref|| in the discrete L2 norm over all points.
inline double relative_error(const Field1D& w, const Field1D& ref) {
    if (!w.same_layout(ref)) {
        throw Error("relative_error: fields have different layouts");
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        num += (w[i] - ref[i]) * (w[i] - ref[i]);
        den += ref[i] * ref[i];
    }
    return std::sqrt(num / den);
}

inline double relative_error(const VectorField& w, const VectorField& ref) {
    double num = 0.0, den = 0.0;
    for (int c = 0; c < 3; ++c) {
        if (!w[c].same_layout(ref[c])) {
            throw Error("relative_error: fields have different layouts");
        }
        for (std::size_t i = 0; i < w[c].size(); ++i) {
            num += (w[c][i] - ref[c][i]) * (w[c][i] - ref[c][i]);
            den += ref[c][i] * ref[c][i];
        }
    }
    return std::sqrt(num / den);
}

/// Q = -1/2 tr(G G) at cell centers, G_ij = delta_j v_i.
inline Field3D q_criterion(const VectorField& v) {
    const CenterTensor g = collocate_gradient(v);
    Field3D q(v.grid(), Stagger::center());
    for (std::size_t k = 0; k < q.size(); ++k) {
        double tr = 0.0;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                tr += g(i, j)[k] * g(j, i)[k];
            }
        }
        q[k] = -0.5 * tr;
    }
    return q;
}

} // namespace dles
