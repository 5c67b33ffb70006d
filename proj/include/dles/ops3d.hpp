#pragma once

// 3D staggered operators and the volume / surface / line two-grid filters.
//
//   volume      f   = g1 g2 g3
//   surface(i)  f_i = product of g_j, j != i   (no averaging along i)
//   line(i, j)  f_ij = g_k, k not in {i, j}
//
// Every filter samples the coarse grid on all three axes: axes that are not
// averaged are restricted to the coincident fine points.

#include <algorithm>
#include <array>
#include <string>

#include "dles/stencil.hpp"

namespace dles {

class FilterKind {
  public:
    enum class Type { volume, surface, line };

    static FilterKind volume() { return FilterKind(Type::volume, -1, -1); }
    static FilterKind surface(int i) {
        check(i);
        return FilterKind(Type::surface, i, -1);
    }
    static FilterKind line(int i, int j) {
        check(i);
        check(j);
        if (i == j) {
            throw Error("FilterKind::line: axes must differ");
        }
        return FilterKind(Type::line, std::min(i, j), std::max(i, j));
    }

    Type type() const { return type_; }

    /// True when the filter averages along axis.
    bool averages(int axis) const {
        switch (type_) {
        case Type::volume:
            return true;
        case Type::surface:
            return axis != a_;
        case Type::line:
            return axis != a_ && axis != b_;
        }
        return false;
    }

    std::array<AxisMode, 3> modes() const {
        std::array<AxisMode, 3> m{};
        for (int a = 0; a < 3; ++a) {
            m[a] = averages(a) ? AxisMode::average : AxisMode::restrict;
        }
        return m;
    }

    std::string name() const {
        switch (type_) {
        case Type::volume:
            return "volume";
        case Type::surface:
            return "surface(" + std::to_string(a_ + 1) + ")";
        case Type::line:
            return "line(" + std::to_string(a_ + 1) + "," + std::to_string(b_ + 1) + ")";
        }
        return {};
    }

    bool operator==(const FilterKind&) const = default;

  private:
    FilterKind(Type t, int a, int b) : type_(t), a_(a), b_(b) {}
    static void check(int i) {
        if (i < 0 || i > 2) {
            throw Error("FilterKind: axis out of range");
        }
    }
    Type type_;
    int a_;
    int b_;
};

inline Field3D diff_3d(const Field3D& u, int axis) { return diff(u, axis); }
inline Field3D interp_3d(const Field3D& u, int axis) { return interp(u, axis); }

/// One-axis coarsening filter g_i: averages along axis only; the other axes
/// are left as they are, so calls compose.
inline Field3D line_filter(const GridPair& pair, const Field3D& u, int axis) {
    detail::check_axis<3>(axis);
    std::array<AxisMode, 3> m{AxisMode::keep, AxisMode::keep, AxisMode::keep};
    m[axis] = AxisMode::average;
    return filter_axes<3>(pair, u, m);
}

/// Scalar two-grid filter from the fine grid to the coarse grid.
inline Field3D filter_scalar(const GridPair& pair, const Field3D& u, const FilterKind& kind) {
    return filter_axes<3>(pair, u, kind.modes());
}

/// Restriction of a fine field to the coincident coarse points.
inline Field3D restrict_3d(const GridPair& pair, const Field3D& u) {
    return filter_axes<3>(pair, u, {AxisMode::restrict, AxisMode::restrict, AxisMode::restrict});
}

/// Velocity divergence delta_j v_j, assembled at cell centers.
inline Field3D divergence(const VectorField& v) {
    Field3D out = diff(v[0], 0);
    out += diff(v[1], 1);
    out += diff(v[2], 2);
    return out;
}

/// Staggered gradient of a centered scalar; component i on face(i).
inline VectorField gradient(const Field3D& p) {
    VectorField g;
    for (int i = 0; i < 3; ++i) {
        g[i] = diff(p, i);
    }
    return g;
}

/// Row divergence delta_j s_ij, component i on face(i).
inline VectorField tensor_divergence(const TensorField& s) {
    VectorField out;
    for (int i = 0; i < 3; ++i) {
        Field3D acc = diff(s(i, 0), 0);
        acc += diff(s(i, 1), 1);
        acc += diff(s(i, 2), 2);
        out[i] = std::move(acc);
    }
    return out;
}

/// delta_i delta_j s_ij at cell centers.
inline Field3D double_divergence(const TensorField& s) { return divergence(tensor_divergence(s)); }

} // namespace dles
