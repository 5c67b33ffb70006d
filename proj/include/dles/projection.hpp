#pragma once

// Pressure projection with the exact eigenvalues of the second-order
// finite-difference Laplacian on a periodic grid.
//
// The Laplacian delta_k delta_k is diagonal in the discrete Fourier basis with
// eigenvalues -(4 / h^2) sum_d sin^2(pi m_d / N). Dividing by these (and not
// by -|2 pi k|^2) makes the discrete projector identities hold to roundoff.

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "dles/fft.hpp"
#include "dles/ops3d.hpp"

namespace dles {

template <int Dim>
class PoissonSolver {
  public:
    explicit PoissonSolver(const GridFor<Dim>& g) : grid_(g), fft_(std::vector<int>(Dim, static_cast<int>(g.n_points))) {
        const std::size_t n = g.n_points;
        const double h = g.spacing();
        std::vector<double> s2(n);
        for (std::size_t m = 0; m < n; ++m) {
            const double s = std::sin(std::numbers::pi * static_cast<double>(m) / static_cast<double>(n));
            s2[m] = s * s;
        }
        const std::size_t nh = n / 2 + 1;
        eigenvalues_.resize(fft_.complex_size());
        std::size_t k = 0;
        if constexpr (Dim == 1) {
            for (std::size_t m = 0; m < nh; ++m) {
                eigenvalues_[k++] = -4.0 / (h * h) * s2[m];
            }
        } else {
            for (std::size_t a = 0; a < n; ++a) {
                for (std::size_t b = 0; b < n; ++b) {
                    for (std::size_t c = 0; c < nh; ++c) {
                        eigenvalues_[k++] = -4.0 / (h * h) * (s2[a] + s2[b] + s2[c]);
                    }
                }
            }
        }
    }

    const GridFor<Dim>& grid() const { return grid_; }

    /// Eigenvalues in the real-to-complex storage order; entry 0 is the mean mode.
    std::span<const double> eigenvalues() const { return eigenvalues_; }

    /// Solves delta_k delta_k p = rhs - mean(rhs) with mean(p) = 0.
    /// If rhs_mean is given, the removed mean is stored there.
    Field<Dim> solve(const Field<Dim>& rhs, double* rhs_mean = nullptr) const {
        if (!rhs.on_grid(grid_) || rhs.location() != Stagger::center()) {
            throw Error("PoissonSolver::solve: right-hand side must be a centered field on the solver grid");
        }
        std::vector<std::complex<double>> spec(fft_.complex_size());
        fft_.forward(rhs.data(), spec.data());
        const double total = static_cast<double>(fft_.real_size());
        if (rhs_mean) {
            *rhs_mean = spec[0].real() / total;
        }
        spec[0] = 0.0;
        for (std::size_t k = 1; k < spec.size(); ++k) {
            spec[k] /= eigenvalues_[k] * total;
        }
        Field<Dim> p(grid_, Stagger::center());
        fft_.inverse(spec.data(), p.data());
        return p;
    }

    const RealFft& fft() const { return fft_; }

  private:
    GridFor<Dim> grid_;
    RealFft fft_;
    std::vector<double> eigenvalues_;
};

using PoissonSolver1D = PoissonSolver<1>;
using PoissonSolver3D = PoissonSolver<3>;

/// pi v = v - delta (delta_k delta_k)^+ delta_j v_j; the result is discretely
/// divergence-free.
inline VectorField project_vector(const PoissonSolver3D& s, const VectorField& v) {
    const Field3D p = s.solve(divergence(v));
    VectorField out = v;
    for (int i = 0; i < 3; ++i) {
        out[i] -= diff(p, i);
    }
    return out;
}

/// Adds the hydrostatic correction q * identity that makes the stress
/// divergence-preserving: delta_i delta_j (pi s)_ij = 0. Off-diagonal entries
/// are returned unchanged.
inline TensorField project_tensor(const PoissonSolver3D& s, const TensorField& sigma) {
    Field3D q = s.solve(double_divergence(sigma));
    q *= -1.0;
    TensorField out = sigma;
    for (int i = 0; i < 3; ++i) {
        out(i, i) += q;
    }
    return out;
}

} // namespace dles
