#pragma once

// Vector two-grid filters for staggered velocity fields.
//   VA:  volume filter on every component
//   PVA: coarse pressure projection of the VA field
//   SA:  surface(i) filter on component i

#include <string>

#include "dles/ops3d.hpp"
#include "dles/projection.hpp"

namespace dles {

enum class VectorFilter { va, pva, sa };

inline std::string to_string(VectorFilter f) {
    switch (f) {
    case VectorFilter::va:
        return "va";
    case VectorFilter::pva:
        return "pva";
    case VectorFilter::sa:
        return "sa";
    }
    return {};
}

inline VectorFilter parse_vector_filter(const std::string& s) {
    if (s == "va" || s == "VA") {
        return VectorFilter::va;
    }
    if (s == "pva" || s == "PVA") {
        return VectorFilter::pva;
    }
    if (s == "sa" || s == "SA") {
        return VectorFilter::sa;
    }
    throw Error("unknown vector filter '" + s + "' (expected va, pva or sa)");
}

inline VectorField filter_vector(const GridPair& pair, const PoissonSolver3D* coarse, const VectorField& v,
                                 VectorFilter kind) {
    VectorField out;
    for (int i = 0; i < 3; ++i) {
        const auto fk = kind == VectorFilter::sa ? FilterKind::surface(i) : FilterKind::volume();
        out[i] = filter_scalar(pair, v[i], fk);
    }
    if (kind == VectorFilter::pva) {
        if (!coarse || coarse->grid() != pair.coarse_3d()) {
            throw Error("filter_vector: PVA needs a Poisson solver on the coarse grid");
        }
        out = project_vector(*coarse, out);
    }
    return out;
}

inline VectorField filter_vector(const GridPair& pair, const PoissonSolver3D& coarse, const VectorField& v,
                                 VectorFilter kind) {
    return filter_vector(pair, &coarse, v, kind);
}

inline VectorField filter_vector(const GridPair& pair, const VectorField& v, VectorFilter kind) {
    return filter_vector(pair, nullptr, v, kind);
}

} // namespace dles
