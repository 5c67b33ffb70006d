#pragma once

// Two-grid sub-filter stresses computed from fine-grid (DNS) data.
//
// Every commutator has the shape  first_term(r^h(v)) - r^H(vbar), where vbar
// is the filtered fine velocity. The filter-swap ("swap") variant uses, per
// stress component, the scalar filter that is left over after the coarse
// difference has absorbed one averaging direction; the classic variant uses
// the same filter as the velocity. The table lives in first_term_filter().

#include <string>

#include "dles/fluxes.hpp"
#include "dles/vector_filters.hpp"

namespace dles {

enum class ClosureKind { no_model, classic, swap, swap_sym };

inline std::string to_string(ClosureKind k) {
    switch (k) {
    case ClosureKind::no_model:
        return "no_model";
    case ClosureKind::classic:
        return "classic";
    case ClosureKind::swap:
        return "swap";
    case ClosureKind::swap_sym:
        return "swap_sym";
    }
    return {};
}

inline ClosureKind parse_closure_kind(const std::string& s) {
    if (s == "no_model" || s == "no-model" || s == "none") {
        return ClosureKind::no_model;
    }
    if (s == "classic") {
        return ClosureKind::classic;
    }
    if (s == "swap") {
        return ClosureKind::swap;
    }
    if (s == "swap_sym" || s == "swap-sym") {
        return ClosureKind::swap_sym;
    }
    throw Error("unknown closure '" + s + "' (expected no_model, classic, swap or swap_sym)");
}

// ---------------------------------------------------------------------------
// 1D Burgers

/// Commutator from the fine flux r^h(v) and the coarse flux of the filtered
/// field r^H(vbar).
inline Field1D burgers_sfs_from_flux(const GridPair& pair, const Field1D& r_fine, const Field1D& r_coarse_of_vbar,
                                     ClosureKind kind) {
    if (kind == ClosureKind::no_model) {
        return Field1D(pair.coarse_1d(), Stagger::face(0));
    }
    Field1D first = kind == ClosureKind::classic ? twogrid_filter_1d(pair, r_fine) : restrict_1d(pair, r_fine);
    first -= r_coarse_of_vbar;
    return first;
}

/// Sub-filter flux at coarse faces. swap_sym has no meaning for a scalar flux
/// and returns the swap flux.
inline Field1D burgers_sfs(const GridPair& pair, const Field1D& v, const BurgersParams& p, ClosureKind kind) {
    require_1d_pair(pair, v);
    if (kind == ClosureKind::no_model) {
        return Field1D(pair.coarse_1d(), Stagger::face(0));
    }
    return burgers_sfs_from_flux(pair, burgers_flux(v, p), burgers_flux(twogrid_filter_1d(pair, v), p), kind);
}

// ---------------------------------------------------------------------------
// 3D Navier-Stokes

/// Scalar filter applied to the fine stress component (i, j) in the first
/// term of the commutator.
///
///   filter  swap                       classic
///   VA      surface(j)                 volume
///   PVA     surface(j), then pi^H      volume, then pi^H
///   SA      surface(i) if i == j       surface(i)
///           line(i, j) otherwise
inline FilterKind first_term_filter(VectorFilter filter, ClosureKind kind, int i, int j) {
    if (kind == ClosureKind::classic) {
        return filter == VectorFilter::sa ? FilterKind::surface(i) : FilterKind::volume();
    }
    if (kind == ClosureKind::no_model) {
        throw Error("first_term_filter: the no-model closure has no first term");
    }
    if (filter == VectorFilter::sa) {
        return i == j ? FilterKind::surface(i) : FilterKind::line(i, j);
    }
    return FilterKind::surface(j);
}

/// First commutator term from the fine projected stress r^h(v), on the coarse grid.
inline TensorField sfs_first_term(const GridPair& pair, const PoissonSolver3D* coarse, const TensorField& r_fine,
                                  VectorFilter filter, ClosureKind kind) {
    TensorField out;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            out(i, j) = filter_scalar(pair, r_fine(i, j), first_term_filter(filter, kind, i, j));
        }
    }
    if (filter == VectorFilter::pva) {
        if (!coarse) {
            throw Error("sfs_first_term: PVA needs the coarse Poisson solver");
        }
        out = project_tensor(*coarse, out);
    }
    return out;
}

/// 1/2 (t_ij + t_ji); t_ij and t_ji share the edge(i, j) points.
inline TensorField symmetrize(const TensorField& t) {
    TensorField out = t;
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            Field3D s = t(i, j);
            s += t(j, i);
            s *= 0.5;
            out(i, j) = s;
            out(j, i) = std::move(s);
        }
    }
    return out;
}

inline TensorField zero_tensor(const Grid3D& g) { return TensorField(g); }

/// Commutator given the fine projected stress and the coarse projected stress
/// of the filtered velocity. Lets callers reuse both across closures.
inline TensorField ns_sfs_from_stresses(const GridPair& pair, const PoissonSolver3D* coarse,
                                        const TensorField& r_fine, const TensorField& r_coarse_of_vbar,
                                        VectorFilter filter, ClosureKind kind) {
    if (kind == ClosureKind::no_model) {
        return zero_tensor(pair.coarse_3d());
    }
    const ClosureKind base = kind == ClosureKind::swap_sym ? ClosureKind::swap : kind;
    TensorField tau = sfs_first_term(pair, coarse, r_fine, filter, base);
    tau -= r_coarse_of_vbar;
    return kind == ClosureKind::swap_sym ? symmetrize(tau) : tau;
}

inline TensorField ns_sfs(const GridPair& pair, const PoissonSolver3D& fine, const PoissonSolver3D& coarse,
                          const VectorField& v, const NSParams& p, VectorFilter filter, ClosureKind kind) {
    if (v.n_points() != pair.n_fine || fine.grid() != pair.fine_3d() || coarse.grid() != pair.coarse_3d()) {
        throw Error("ns_sfs: velocity or solvers do not match the grid pair");
    }
    if (kind == ClosureKind::no_model) {
        return zero_tensor(pair.coarse_3d());
    }
    const VectorField vbar = filter_vector(pair, coarse, v, filter);
    return ns_sfs_from_stresses(pair, &coarse, ns_projected_stress(fine, v, p), ns_projected_stress(coarse, vbar, p),
                                filter, kind);
}

/// Non-structural remainder of the surface-averaged equation:
/// mu_i = (delta^h_i - delta^H_i) f_i r^h_ii, at coarse face(i) points.
/// f_i r_ii is kept at fine resolution along axis i so that delta^h_i can act.
inline VectorField ns_mu_star_from_stress(const GridPair& pair, const TensorField& r_fine) {
    VectorField mu;
    for (int i = 0; i < 3; ++i) {
        std::array<AxisMode, 3> avg{AxisMode::average, AxisMode::average, AxisMode::average};
        avg[i] = AxisMode::keep;
        const Field3D s = filter_axes<3>(pair, r_fine(i, i), avg);
        std::array<AxisMode, 3> restrict_i{AxisMode::keep, AxisMode::keep, AxisMode::keep};
        restrict_i[i] = AxisMode::restrict;
        Field3D m = filter_axes<3>(pair, diff(s, i), restrict_i);
        m -= diff(filter_axes<3>(pair, s, restrict_i), i);
        mu[i] = std::move(m);
    }
    return mu;
}

inline VectorField ns_mu_star(const GridPair& pair, const PoissonSolver3D& fine, const VectorField& v,
                              const NSParams& p) {
    if (v.n_points() != pair.n_fine) {
        throw Error("ns_mu_star: velocity is not on the fine grid of the pair");
    }
    return ns_mu_star_from_stress(pair, ns_projected_stress(fine, v, p));
}

} // namespace dles
