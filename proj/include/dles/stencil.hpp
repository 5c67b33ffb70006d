#pragma once

// Dimension-generic staggered stencils along one axis: difference,
// interpolation, and the (2n + 1)-point two-grid averages.

#include <array>
#include <cstddef>
#include <string>

#include "dles/grid.hpp"

namespace dles {

namespace detail {

// A field viewed as [outer][n][inner] with respect to one axis.
struct AxisView {
    std::size_t outer = 1;
    std::size_t n = 1;
    std::size_t inner = 1;
};

template <int Dim>
AxisView axis_view(const std::array<std::size_t, Dim>& shape, int axis) {
    AxisView v;
    for (int a = 0; a < axis; ++a) {
        v.outer *= shape[a];
    }
    v.n = shape[axis];
    for (int a = axis + 1; a < Dim; ++a) {
        v.inner *= shape[a];
    }
    return v;
}

template <int Dim>
void check_axis(int axis) {
    if (axis < 0 || axis >= Dim) {
        throw Error("axis " + std::to_string(axis) + " out of range for a " + std::to_string(Dim) + "D field");
    }
}

} // namespace detail

/// Staggered difference (u(x + h/2) - u(x - h/2)) / h along axis.
template <int Dim>
Field<Dim> diff(const Field<Dim>& u, int axis) {
    detail::check_axis<Dim>(axis);
    Field<Dim> out(u.shape(), u.length(), u.location().toggled(axis));
    const auto v = detail::axis_view<Dim>(u.shape(), axis);
    const double inv_h = 1.0 / u.spacing(axis);
    // centered input: out[i] sits at the right face of cell i
    const std::ptrdiff_t lo = u.location().is_face(axis) ? -1 : 0;
    const double* in = u.data();
    double* o = out.data();
    const auto n = static_cast<std::ptrdiff_t>(v.n);
    for (std::size_t a = 0; a < v.outer; ++a) {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const std::size_t im = wrap(i + lo, v.n);
            const std::size_t ip = wrap(i + lo + 1, v.n);
            const double* pm = in + (a * v.n + im) * v.inner;
            const double* pp = in + (a * v.n + ip) * v.inner;
            double* po = o + (a * v.n + static_cast<std::size_t>(i)) * v.inner;
            for (std::size_t b = 0; b < v.inner; ++b) {
                po[b] = (pp[b] - pm[b]) * inv_h;
            }
        }
    }
    return out;
}

/// Two-point average (u(x - h/2) + u(x + h/2)) / 2 along axis.
template <int Dim>
Field<Dim> interp(const Field<Dim>& u, int axis) {
    detail::check_axis<Dim>(axis);
    Field<Dim> out(u.shape(), u.length(), u.location().toggled(axis));
    const auto v = detail::axis_view<Dim>(u.shape(), axis);
    const std::ptrdiff_t lo = u.location().is_face(axis) ? -1 : 0;
    const double* in = u.data();
    double* o = out.data();
    const auto n = static_cast<std::ptrdiff_t>(v.n);
    for (std::size_t a = 0; a < v.outer; ++a) {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const std::size_t im = wrap(i + lo, v.n);
            const std::size_t ip = wrap(i + lo + 1, v.n);
            const double* pm = in + (a * v.n + im) * v.inner;
            const double* pp = in + (a * v.n + ip) * v.inner;
            double* po = o + (a * v.n + static_cast<std::size_t>(i)) * v.inner;
            for (std::size_t b = 0; b < v.inner; ++b) {
                po[b] = 0.5 * (pm[b] + pp[b]);
            }
        }
    }
    return out;
}

/// What a two-grid filter does along one axis.
enum class AxisMode {
    keep,     ///< leave the axis untouched
    restrict, ///< sample the coincident fine points (no averaging)
    average,  ///< (2n + 1)-point mean, sampled at coarse points
    smooth,   ///< (2n + 1)-point mean at every fine point (stays on the fine grid)
};

namespace detail {

template <int Dim>
void check_fine_axis(const GridPair& pair, const Field<Dim>& u, int axis) {
    if (u.extent(axis) != pair.n_fine || u.length() != pair.length) {
        throw Error("two-grid filter: field has " + std::to_string(u.extent(axis)) + " points along axis " +
                    std::to_string(axis + 1) + ", expected the fine grid size " + std::to_string(pair.n_fine));
    }
}

template <int Dim>
Field<Dim> apply_axis(const GridPair& pair, const Field<Dim>& u, int axis, AxisMode mode) {
    check_fine_axis(pair, u, axis);
    const bool face = u.location().is_face(axis);
    auto shape = u.shape();
    if (mode == AxisMode::restrict || mode == AxisMode::average) {
        shape[axis] = pair.n_coarse;
    }
    Field<Dim> out(shape, u.length(), u.location());
    const auto vin = axis_view<Dim>(u.shape(), axis);
    const auto vout = axis_view<Dim>(out.shape(), axis);
    const auto hw = static_cast<std::ptrdiff_t>(pair.half_width());
    const auto inv = 1.0 / static_cast<double>(pair.factor);
    const double* in = u.data();
    double* o = out.data();

    for (std::size_t a = 0; a < vin.outer; ++a) {
        for (std::size_t i = 0; i < vout.n; ++i) {
            double* po = o + (a * vout.n + i) * vout.inner;
            const auto center = static_cast<std::ptrdiff_t>(
                mode == AxisMode::smooth ? i : pair.fine_index(i, face));
            if (mode == AxisMode::restrict) {
                const double* pi = in + (a * vin.n + static_cast<std::size_t>(center)) * vin.inner;
                for (std::size_t b = 0; b < vin.inner; ++b) {
                    po[b] = pi[b];
                }
                continue;
            }
            for (std::size_t b = 0; b < vin.inner; ++b) {
                po[b] = 0.0;
            }
            for (std::ptrdiff_t s = -hw; s <= hw; ++s) {
                const double* pi = in + (a * vin.n + wrap(center + s, vin.n)) * vin.inner;
                for (std::size_t b = 0; b < vin.inner; ++b) {
                    po[b] += pi[b];
                }
            }
            for (std::size_t b = 0; b < vin.inner; ++b) {
                po[b] *= inv;
            }
        }
    }
    return out;
}

} // namespace detail

/// Applies the per-axis two-grid operations in axis order 1, 2, 3.
template <int Dim>
Field<Dim> filter_axes(const GridPair& pair, const Field<Dim>& u, const std::array<AxisMode, Dim>& modes) {
    Field<Dim> out = u;
    for (int a = 0; a < Dim; ++a) {
        if (modes[a] != AxisMode::keep) {
            out = detail::apply_axis(pair, out, a, modes[a]);
        }
    }
    return out;
}

} // namespace dles
