#pragma once

// Central (unlimited) fluxes for viscous Burgers and the staggered
// incompressible Navier-Stokes stress, at any grid level.

#include <cmath>

#include "dles/ops1d.hpp"
#include "dles/ops3d.hpp"
#include "dles/projection.hpp"

namespace dles {

struct BurgersParams {
    double nu;
    explicit BurgersParams(double viscosity) : nu(viscosity) {
        if (!(nu > 0.0)) {
            throw Error("BurgersParams: viscosity must be positive");
        }
    }
};

struct NSParams {
    double nu;
    explicit NSParams(double viscosity) : nu(viscosity) {
        if (!(nu > 0.0)) {
            throw Error("NSParams: viscosity must be positive");
        }
    }
};

/// r(u) = 1/2 (eta u)^2 - nu delta u at faces; the flux through face i+1/2
/// only sees u_i and u_{i+1}.
inline Field1D burgers_flux(const Field1D& u, const BurgersParams& p) {
    if (u.location() != Stagger::center()) {
        throw Error("burgers_flux: expects a cell-centered field");
    }
    Field1D r = interp_1d(u);
    const Field1D du = diff_1d(u);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = 0.5 * r[i] * r[i] - p.nu * du[i];
    }
    return r;
}

/// du/dt = -delta r(u).
inline Field1D burgers_rhs(const Field1D& u, const BurgersParams& p) {
    Field1D out = diff_1d(burgers_flux(u, p));
    out *= -1.0;
    return out;
}

/// Convective part (eta_j v_i)(eta_i v_j) only. Exposed for the energy tests.
inline TensorField convective_stress(const VectorField& v) {
    TensorField s;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            Field3D a = interp(v[i], j);
            const Field3D b = interp(v[j], i);
            for (std::size_t k = 0; k < a.size(); ++k) {
                a[k] *= b[k];
            }
            s(i, j) = std::move(a);
        }
    }
    return s;
}

/// sigma_ij = (eta_j v_i)(eta_i v_j) - nu (delta_j v_i + delta_i v_j).
/// Diagonal entries land on centers, off-diagonal ones on edge(i, j).
inline TensorField ns_stress(const VectorField& v, const NSParams& p) {
    // the expression is symmetric in (i, j) term by term, so the lower
    // triangle is a bitwise copy of the upper one
    TensorField s;
    for (int i = 0; i < 3; ++i) {
        for (int j = i; j < 3; ++j) {
            Field3D a = interp(v[i], j);
            const Field3D b = interp(v[j], i);
            const Field3D dji = diff(v[i], j);
            const Field3D dij = diff(v[j], i);
            for (std::size_t k = 0; k < a.size(); ++k) {
                a[k] = a[k] * b[k] - p.nu * (dji[k] + dij[k]);
            }
            if (j != i) {
                s(j, i) = a;
            }
            s(i, j) = std::move(a);
        }
    }
    return s;
}

/// r = sigma + q identity, divergence-preserving.
inline TensorField ns_projected_stress(const PoissonSolver3D& s, const VectorField& v, const NSParams& p) {
    return project_tensor(s, ns_stress(v, p));
}

/// dv/dt = -delta_j r_ij(v); the result is discretely divergence-free.
inline VectorField ns_rhs(const PoissonSolver3D& s, const VectorField& v, const NSParams& p) {
    VectorField out = tensor_divergence(ns_projected_stress(s, v, p));
    out *= -1.0;
    return out;
}

/// Discrete L2 inner product over all velocity points, weighted by h^3.
inline double inner_product(const VectorField& a, const VectorField& b) {
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (std::size_t k = 0; k < a[i].size(); ++k) {
            sum += a[i][k] * b[i][k];
        }
    }
    const double h = a[0].spacing(0);
    return sum * h * h * h;
}

inline double inner_product(const Field1D& a, const Field1D& b) {
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        sum += a[k] * b[k];
    }
    return sum * a.spacing(0);
}

} // namespace dles
