#pragma once

// 1D staggered finite difference, interpolation and the two-grid filter.

#include <cmath>
#include <functional>

#include "dles/stencil.hpp"

namespace dles {

inline void require_1d_pair(const GridPair& pair, const Field1D& u) {
    if (u.extent(0) != pair.n_fine || u.length() != pair.length) {
        throw Error("two-grid filter: field with " + std::to_string(u.extent(0)) +
                    " points does not live on the fine grid of the pair (" + std::to_string(pair.n_fine) + ")");
    }
}

inline Field1D diff_1d(const Field1D& u) { return diff(u, 0); }
inline Field1D interp_1d(const Field1D& u) { return interp(u, 0); }

/// (2n + 1)-point average evaluated at the coarse points of the pair.
inline Field1D twogrid_filter_1d(const GridPair& pair, const Field1D& u) {
    require_1d_pair(pair, u);
    return filter_axes<1>(pair, u, {AxisMode::average});
}

/// Same average evaluated at every fine point; the result stays on the fine grid.
inline Field1D twogrid_smooth_1d(const GridPair& pair, const Field1D& u) {
    require_1d_pair(pair, u);
    return filter_axes<1>(pair, u, {AxisMode::smooth});
}

/// Samples the fine field at the coincident coarse points.
inline Field1D restrict_1d(const GridPair& pair, const Field1D& u) {
    require_1d_pair(pair, u);
    return filter_axes<1>(pair, u, {AxisMode::restrict});
}

/// Top-hat average (1/w) * integral of u over [x - w/2, x + w/2] by composite
/// Simpson quadrature with `panels` panels. Only usable on closed-form u; it
/// serves as the continuous reference for the discrete filters.
inline double tophat_filter_analytic(const std::function<double(double)>& u, double width, double x,
                                     int panels = 256) {
    if (panels < 64) {
        throw Error("tophat_filter_analytic: need at least 64 quadrature panels");
    }
    if (panels % 2 != 0) {
        ++panels;
    }
    const double a = x - 0.5 * width;
    const double step = width / panels;
    double sum = u(a) + u(a + width);
    for (int k = 1; k < panels; ++k) {
        sum += (k % 2 == 1 ? 4.0 : 2.0) * u(a + k * step);
    }
    return sum * step / 3.0 / width;
}

} // namespace dles
