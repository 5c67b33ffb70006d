#pragma once

// Non-symmetric tensor-basis closures evaluated from a coarse staggered
// velocity, and the 1D Smagorinsky reference model.
//
// The basis is built from S = (G + G^T)/2 and R = (G - G^T)/2 where
// G_ij = delta_j w_i. Staggered gradients are first collocated at cell
// centers; the model stress is evaluated there and then interpolated back to
// the staggered stress layout. The placement is a choice of this library: the
// continuous model does not prescribe one.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>

#include "dles/ops1d.hpp"
#include "dles/ops3d.hpp"

namespace dles {

using Mat3 = Eigen::Matrix3d;

/// Moves a field at any stagger location to cell centers by two-point
/// averages along its face axes (lowest axis first).
inline Field3D collocate_to_center(const Field3D& f) {
    Field3D out = f;
    for (int a = 0; a < 3; ++a) {
        if (out.location().is_face(a)) {
            out = interp(out, a);
        }
    }
    return out;
}

/// Nine centered fields, entry (i, j) at index 3 i + j.
struct CenterTensor {
    std::array<Field3D, 9> c;

    Field3D& operator()(int i, int j) { return c[3 * i + j]; }
    const Field3D& operator()(int i, int j) const { return c[3 * i + j]; }
    std::size_t size() const { return c[0].size(); }

    Mat3 at(std::size_t lin) const {
        Mat3 m;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                m(i, j) = (*this)(i, j)[lin];
            }
        }
        return m;
    }
};

struct PointGradient {
    Mat3 G;

    Mat3 S() const { return 0.5 * (G + G.transpose()); }
    Mat3 R() const { return 0.5 * (G - G.transpose()); }
};

/// G_ij = delta_j w_i collocated at cell centers. Diagonal entries are already
/// centered; off-diagonal ones are averaged from edge(i, j).
inline CenterTensor collocate_gradient(const VectorField& w) {
    CenterTensor g;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            g(i, j) = collocate_to_center(diff(w[i], j));
        }
    }
    return g;
}

struct TensorBasis {
    std::array<Mat3, 10> A; ///< symmetric, trace-free
    std::array<Mat3, 6> B;  ///< antisymmetric
    std::array<double, 5> lambda;
};

inline Mat3 dev(const Mat3& m) { return m - m.trace() / 3.0 * Mat3::Identity(); }

inline TensorBasis tensor_basis(const PointGradient& g) {
    const Mat3 S = g.S();
    const Mat3 R = g.R();
    const Mat3 S2 = S * S;
    const Mat3 R2 = R * R;
    const Mat3 SR = S * R;
    const Mat3 RS = R * S;

    TensorBasis b;
    b.A[0] = S;
    b.A[1] = SR - RS;
    b.A[2] = dev(S2);
    b.A[3] = dev(R2);
    b.A[4] = S2 * R - R * S2;
    b.A[5] = dev(S * R2 + R2 * S);
    b.A[6] = R * S * R2 - R2 * S * R;
    b.A[7] = S * R * S2 - S2 * R * S;
    b.A[8] = dev(S2 * R2 + R2 * S2);
    b.A[9] = R * S2 * R2 - R2 * S2 * R;

    b.B[0] = R;
    b.B[1] = SR + RS;
    b.B[2] = S2 * R + R * S2;
    b.B[3] = S * R2 - R2 * S;
    b.B[4] = S2 * R2 - R2 * S2;
    b.B[5] = S2 * R2 * S - S * R2 * S2;

    // products are symmetric (antisymmetric) only up to roundoff; store the
    // exact symmetry class
    for (auto& a : b.A) {
        a = 0.5 * (a + a.transpose()).eval();
    }
    for (auto& m : b.B) {
        m = 0.5 * (m - m.transpose()).eval();
    }

    b.lambda = {S2.trace(), R2.trace(), (S2 * S).trace(), (S * R2).trace(), (S2 * R2).trace()};
    return b;
}

struct BasisWeights {
    std::array<double, 10> alpha{};
    std::array<double, 6> beta{};
};

/// Coefficient functions of the five invariants plus the filter width.
struct BasisCoefficients {
    std::function<BasisWeights(const std::array<double, 5>&)> weights;
    double delta;

    static BasisCoefficients constant(const BasisWeights& w, double delta) {
        return {[w](const std::array<double, 5>&) { return w; }, delta};
    }

    /// alpha_1 = -2 nu_T / delta^2, which reduces the model to -2 nu_T S.
    static BasisCoefficients eddy_viscosity(double nu_t, double delta) {
        BasisWeights w;
        w.alpha[0] = -2.0 * nu_t / (delta * delta);
        return constant(w, delta);
    }
};

/// m = delta^2 (sum alpha_k A_k + sum beta_k B_k) evaluated at cell centers.
/// The A part is stored as an exactly symmetric matrix and the B part as an
/// exactly antisymmetric one.
inline CenterTensor tensor_basis_model_centered(const VectorField& w, const BasisCoefficients& coeffs) {
    const CenterTensor g = collocate_gradient(w);
    CenterTensor m;
    for (auto& f : m.c) {
        f = Field3D(w.grid(), Stagger::center());
    }
    const double d2 = coeffs.delta * coeffs.delta;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const TensorBasis b = tensor_basis(PointGradient{g.at(k)});
        const BasisWeights wts = coeffs.weights(b.lambda);
        Mat3 sym = Mat3::Zero();
        Mat3 skew = Mat3::Zero();
        for (int n = 0; n < 10; ++n) {
            sym += wts.alpha[n] * b.A[n];
        }
        for (int n = 0; n < 6; ++n) {
            skew += wts.beta[n] * b.B[n];
        }
        sym = 0.5 * (sym + sym.transpose());
        skew = 0.5 * (skew - skew.transpose());
        const Mat3 out = d2 * (sym + skew);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                m(i, j)[k] = out(i, j);
            }
        }
    }
    return m;
}

/// Tensor-basis model redistributed to the staggered stress layout.
inline TensorField tensor_basis_model(const VectorField& w, const BasisCoefficients& coeffs) {
    const CenterTensor m = tensor_basis_model_centered(w, coeffs);
    TensorField out;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (i == j) {
                out(i, j) = m(i, j);
            } else {
                const int lo = std::min(i, j);
                const int hi = std::max(i, j);
                out(i, j) = interp(interp(m(i, j), lo), hi);
            }
        }
    }
    return out;
}

/// m = -(theta delta)^2 |delta w| delta w at faces.
inline Field1D smagorinsky_1d(const Field1D& w, double theta, double delta) {
    Field1D m = diff_1d(w);
    const double c = (theta * delta) * (theta * delta);
    for (std::size_t i = 0; i < m.size(); ++i) {
        m[i] = -c * std::abs(m[i]) * m[i];
    }
    return m;
}

} // namespace dles
