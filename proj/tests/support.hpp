#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "dles/dles.hpp"

namespace dles::fixtures {

template <int Dim>
Field<Dim> random_field(const typename Field<Dim>::Shape& shape, double length, Stagger loc, std::uint64_t seed) {
    Field<Dim> f(shape, length, loc);
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (auto& x : f.values()) {
        x = d(gen);
    }
    return f;
}

inline Field1D random_1d(const Grid1D& g, Stagger loc, std::uint64_t seed) {
    return random_field<1>({g.n_points}, g.length, loc, seed);
}

inline Field3D random_3d(const Grid3D& g, Stagger loc, std::uint64_t seed) {
    return random_field<3>(Field3D::uniform_shape(g.n_points), g.length, loc, seed);
}

inline VectorField random_vector(const Grid3D& g, std::uint64_t seed) {
    VectorField v(g);
    for (int i = 0; i < 3; ++i) {
        v[i] = random_3d(g, Stagger::face(i), seed * 3 + static_cast<std::uint64_t>(i));
    }
    return v;
}

inline TensorField random_tensor(const Grid3D& g, std::uint64_t seed) {
    TensorField t(g);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            t(i, j) = random_3d(g, TensorField::location(i, j), seed * 9 + static_cast<std::uint64_t>(3 * i + j));
        }
    }
    return t;
}

/// Smooth random divergence-free field made from a few low Fourier modes.
inline VectorField smooth_solenoidal(const PoissonSolver3D& s, std::uint64_t seed, int modes = 3) {
    const Grid3D g = s.grid();
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    VectorField v(g);
    const double two_pi = 2.0 * std::numbers::pi / g.length;
    for (int m = 0; m < modes; ++m) {
        for (int i = 0; i < 3; ++i) {
            const double k0 = std::round(2 * d(gen) + 0.5), k1 = std::round(2 * d(gen)), k2 = std::round(2 * d(gen));
            const double amp = d(gen), ph = 3.0 * d(gen);
            Field3D f = Field3D::from_function(g, Stagger::face(i), [&](const std::array<double, 3>& x) {
                return amp * std::sin(two_pi * (k0 * x[0] + k1 * x[1] + k2 * x[2]) + ph);
            });
            v[i] += f;
        }
    }
    return project_vector(s, v);
}

template <int Dim>
double max_abs(const Field<Dim>& f) {
    double m = 0.0;
    for (double x : f.values()) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

template <int Dim>
double max_abs_diff(const Field<Dim>& a, const Field<Dim>& b) {
    if (!a.same_layout(b)) {
        throw Error("max_abs_diff: layouts differ, " + a.location().name() + " vs " + b.location().name());
    }
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        m = std::max(m, std::abs(a[k] - b[k]));
    }
    return m;
}

inline double max_abs(const VectorField& v) {
    return std::max({max_abs(v[0]), max_abs(v[1]), max_abs(v[2])});
}

inline double max_abs_diff(const VectorField& a, const VectorField& b) {
    return std::max({max_abs_diff(a[0], b[0]), max_abs_diff(a[1], b[1]), max_abs_diff(a[2], b[2])});
}

inline double max_abs(const TensorField& t) {
    double m = 0.0;
    for (const auto& f : t.c) {
        m = std::max(m, max_abs(f));
    }
    return m;
}

inline double max_abs_diff(const TensorField& a, const TensorField& b) {
    double m = 0.0;
    for (int k = 0; k < 9; ++k) {
        m = std::max(m, max_abs_diff(a.c[k], b.c[k]));
    }
    return m;
}

} // namespace dles::fixtures
