#include <gtest/gtest.h>

#include "support.hpp"

using namespace dles;
using fixtures::max_abs;
using fixtures::max_abs_diff;

namespace {

Field3D laplacian(const Field3D& p) {
    Field3D out = diff(diff(p, 0), 0);
    out += diff(diff(p, 1), 1);
    out += diff(diff(p, 2), 2);
    return out;
}

double mean(const Field3D& f) {
    double s = 0.0;
    for (double x : f.values()) {
        s += x;
    }
    return s / static_cast<double>(f.size());
}

} // namespace

TEST(Poisson, ZeroAndEigenvalues) {
    const PoissonSolver3D s(Grid3D(8));
    EXPECT_EQ(max_abs(s.solve(Field3D(s.grid(), Stagger::center()))), 0.0);
    EXPECT_EQ(s.eigenvalues()[0], 0.0);
    for (std::size_t k = 1; k < s.eigenvalues().size(); ++k) {
        EXPECT_LT(s.eigenvalues()[k], 0.0);
    }
    EXPECT_THROW(s.solve(Field3D(s.grid(), Stagger::face(0))), Error);
    EXPECT_THROW(s.solve(Field3D(Grid3D(9), Stagger::center())), Error);
}

TEST(Poisson, RecoversZeroMeanPotential) {
    for (std::size_t n : {7u, 12u, 18u}) {
        const PoissonSolver3D s{Grid3D(n, 1.3)};
        Field3D q = fixtures::random_3d(s.grid(), Stagger::center(), n);
        const double m = mean(q);
        for (auto& x : q.values()) {
            x -= m;
        }
        const Field3D p = s.solve(laplacian(q));
        EXPECT_LE(max_abs_diff(p, q), 1e-12);
        EXPECT_LE(std::abs(mean(p)), 1e-14);
    }
}

TEST(Poisson, SingleModeIsScaledByEigenvalue) {
    const std::size_t n = 16;
    const PoissonSolver3D s{Grid3D(n)};
    const double h = s.grid().spacing();
    const int k[3] = {1, 3, 2};
    const double pi = std::numbers::pi;
    const Field3D rhs = Field3D::from_function(s.grid(), Stagger::center(), [&](const auto& x) {
        return std::cos(2 * pi * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]));
    });
    double lambda = 0.0;
    for (int d = 0; d < 3; ++d) {
        const double sn = std::sin(pi * k[d] / static_cast<double>(n));
        lambda -= 4.0 / (h * h) * sn * sn;
    }
    Field3D expect = rhs;
    expect *= 1.0 / lambda;
    EXPECT_LE(max_abs_diff(s.solve(rhs), expect), 1e-14);
}

TEST(Poisson, ReportsRemovedMean) {
    const PoissonSolver1D s{Grid1D(10, 2.0)};
    Field1D rhs = Field1D::from_function(s.grid(), Stagger::center(), [](const auto& x) { return 3.0 + x[0]; });
    double m = 0.0;
    const Field1D p = s.solve(rhs, &m);
    EXPECT_NEAR(m, 4.0, 1e-14);
    const Field1D lap = diff_1d(diff_1d(p));
    for (std::size_t i = 0; i < lap.size(); ++i) {
        EXPECT_NEAR(lap[i], rhs[i] - m, 1e-12);
    }
}

class Projectors : public ::testing::TestWithParam<std::size_t> {};

TEST_P(Projectors, VectorIdentities) {
    const PoissonSolver3D s{Grid3D(GetParam())};
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const VectorField v = fixtures::random_vector(s.grid(), seed);
        const VectorField pv = project_vector(s, v);
        const double scale = max_abs(pv);
        EXPECT_LE(max_abs(divergence(pv)) * s.grid().spacing(), 1e-12 * scale);
        EXPECT_LE(max_abs_diff(project_vector(s, pv), pv), 1e-12 * scale);

        const Field3D phi = fixtures::random_3d(s.grid(), Stagger::center(), seed + 100);
        const VectorField g = gradient(phi);
        EXPECT_LE(max_abs(project_vector(s, g)), 1e-12 * max_abs(g));
    }
}

TEST_P(Projectors, TensorIdentities) {
    const PoissonSolver3D s{Grid3D(GetParam())};
    const double h = s.grid().spacing();
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const TensorField sigma = fixtures::random_tensor(s.grid(), seed);
        const TensorField ps = project_tensor(s, sigma);
        EXPECT_LE(max_abs(double_divergence(ps)), 1e-10 * max_abs(sigma) / (h * h));
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                if (i != j) {
                    EXPECT_EQ(max_abs_diff(ps(i, j), sigma(i, j)), 0.0);
                }
            }
        }
        const TensorField pps = project_tensor(s, ps);
        EXPECT_LE(max_abs_diff(pps, ps), 1e-12 * max_abs(ps));

        // the divergence of the projected tensor is the projected divergence
        const VectorField lhs = tensor_divergence(ps);
        const VectorField rhs = project_vector(s, tensor_divergence(sigma));
        EXPECT_LE(max_abs_diff(lhs, rhs), 1e-11 * max_abs(rhs));
    }
}

TEST_P(Projectors, TensorWithoutDoubleDivergenceIsUnchanged) {
    const PoissonSolver3D s{Grid3D(GetParam())};
    TensorField sigma(s.grid());
    // an off-diagonal-only antisymmetric tensor has zero double divergence
    const Field3D a = fixtures::random_3d(s.grid(), Stagger::edge(0, 1), 9);
    sigma(0, 1) = a;
    sigma(1, 0) = a;
    sigma(1, 0) *= -1.0;
    EXPECT_LE(max_abs(double_divergence(sigma)), 1e-10);
    EXPECT_LE(max_abs_diff(project_tensor(s, sigma), sigma), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(GridSizes, Projectors, ::testing::Values(6u, 9u, 16u, 18u));
