#include <gtest/gtest.h>

#include "support.hpp"

using namespace dles;
using fixtures::max_abs;
using fixtures::max_abs_diff;

TEST(BurgersFlux, ConstantAndDeltaStencil) {
    const Grid1D g(10, 1.0);
    const BurgersParams p(0.1);
    const Field1D c = Field1D::from_function(g, Stagger::center(), [](auto&) { return 3.0; });
    const Field1D rc = burgers_flux(c, p);
    for (double x : rc.values()) {
        EXPECT_EQ(x, 4.5);
    }
    EXPECT_EQ(max_abs(burgers_rhs(c, p)), 0.0);

    Field1D d(g, Stagger::center());
    d[4] = 1.0;
    const Field1D r = burgers_flux(d, p);
    const double h = g.spacing();
    // face 3 sits between cells 3 and 4, face 4 between 4 and 5
    EXPECT_NEAR(r[3], 0.125 - 0.1 / h, 1e-14);
    EXPECT_NEAR(r[4], 0.125 + 0.1 / h, 1e-14);
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (i != 3 && i != 4) {
            EXPECT_EQ(r[i], 0.0);
        }
    }
    EXPECT_THROW(burgers_flux(Field1D(g, Stagger::face(0)), p), Error);
    EXPECT_THROW(BurgersParams(0.0), Error);
}

TEST(BurgersFlux, SawtoothIsPeriodic) {
    const Grid1D g(8, 8.0);
    const BurgersParams p(0.5);
    const Field1D u = Field1D::from_function(g, Stagger::center(), [](const auto& x) { return x[0]; });
    const Field1D rhs = burgers_rhs(u, p);
    // flux at face i: 0.5 * ((u_i + u_{i+1}) / 2)^2 - nu * (u_{i+1} - u_i)
    auto flux = [&](std::ptrdiff_t i) {
        const double a = u.at({i}), b = u.at({i + 1});
        return 0.5 * 0.25 * (a + b) * (a + b) - 0.5 * (b - a);
    };
    for (std::ptrdiff_t i = 0; i < 8; ++i) {
        EXPECT_NEAR(rhs.at({i}), -(flux(i) - flux(i - 1)), 1e-13);
    }
}

TEST(BurgersFlux, SecondOrderConvergence) {
    const double nu = 0.05;
    const double two_pi = 2.0 * std::numbers::pi;
    auto u = [](double x) { return std::sin(x) + 0.5 * std::cos(2 * x); };
    auto ux = [](double x) { return std::cos(x) - std::sin(2 * x); };
    auto uxx = [](double x) { return -std::sin(x) - 2 * std::cos(2 * x); };
    std::vector<double> errs;
    for (std::size_t n : {32u, 64u, 128u, 256u}) {
        const Grid1D g(n, two_pi);
        const Field1D f = Field1D::from_function(g, Stagger::center(), [&](const auto& x) { return u(x[0]); });
        const Field1D rhs = burgers_rhs(f, BurgersParams(nu));
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = f.coordinate(0, i);
            err = std::max(err, std::abs(rhs[i] - (-u(x) * ux(x) + nu * uxx(x))));
        }
        errs.push_back(err);
    }
    for (std::size_t k = 1; k < errs.size(); ++k) {
        const double order = std::log2(errs[k - 1] / errs[k]);
        EXPECT_GE(order, 1.9);
        EXPECT_LE(order, 2.1);
    }
}

TEST(NSStress, ConstantAndSymmetry) {
    const Grid3D g(7);
    const NSParams p(0.01);
    VectorField c(g);
    const double cs[3] = {0.3, -1.1, 2.0};
    for (int i = 0; i < 3; ++i) {
        for (auto& x : c[i].values()) {
            x = cs[i];
        }
    }
    const TensorField s = ns_stress(c, p);
    EXPECT_TRUE(s.valid_layout());
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            for (double x : s(i, j).values()) {
                EXPECT_DOUBLE_EQ(x, cs[i] * cs[j]);
            }
        }
    }
    EXPECT_EQ(max_abs(ns_stress(VectorField(g), p)), 0.0);

    const VectorField v = fixtures::random_vector(g, 3);
    const TensorField r = ns_stress(v, p);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            EXPECT_EQ(max_abs_diff(r(i, j), r(j, i)), 0.0);
        }
    }
}

TEST(NSStress, ProjectedStressAndRhs) {
    const Grid3D g(12);
    const PoissonSolver3D s(g);
    const NSParams p(0.02);
    const VectorField v = fixtures::random_vector(g, 4);
    const TensorField sigma = ns_stress(v, p);
    const TensorField r = ns_projected_stress(s, v, p);
    const double h = g.spacing();
    EXPECT_LE(max_abs(double_divergence(r)), 1e-10 * max_abs(sigma) / (h * h));
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (i != j) {
                EXPECT_EQ(max_abs_diff(r(i, j), sigma(i, j)), 0.0);
            }
        }
    }
    const VectorField rhs = ns_rhs(s, v, p);
    EXPECT_LE(max_abs(divergence(rhs)) * h, 1e-11 * max_abs(rhs));
    EXPECT_EQ(max_abs(ns_rhs(s, VectorField(g), p)), 0.0);
}

TEST(NSStress, ConvectionConservesEnergy) {
    for (std::size_t n : {8u, 15u}) {
        const Grid3D g(n);
        const PoissonSolver3D s(g);
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const VectorField v = project_vector(s, fixtures::random_vector(g, seed));
            const VectorField div = tensor_divergence(convective_stress(v));
            const double e = inner_product(v, div);
            const double scale = std::pow(inner_product(v, v), 1.5) / g.spacing();
            EXPECT_LE(std::abs(e), 1e-12 * scale);
        }
    }
}

TEST(NSStress, SecondOrderConvergence) {
    const double nu = 0.1;
    const double k = 2.0 * std::numbers::pi;
    std::vector<double> errs;
    for (std::size_t n : {16u, 32u, 64u}) {
        const Grid3D g(n);
        VectorField v(g);
        // v = (sin(k y), 0, 0): sigma_12 = 0 - nu k cos(k y) at edge(0, 1)
        v[0] = Field3D::from_function(g, Stagger::face(0), [&](const auto& x) { return std::sin(k * x[1]); });
        const TensorField s = ns_stress(v, NSParams(nu));
        double err = 0.0;
        for (std::size_t m = 0; m < s(0, 1).size(); ++m) {
            const auto idx = s(0, 1).unravel(m);
            const double y = s(0, 1).coordinate(1, idx[1]);
            err = std::max(err, std::abs(s(0, 1)[m] + nu * k * std::cos(k * y)));
        }
        errs.push_back(err);
    }
    for (std::size_t i = 1; i < errs.size(); ++i) {
        const double order = std::log2(errs[i - 1] / errs[i]);
        EXPECT_GE(order, 1.9);
        EXPECT_LE(order, 2.1);
    }
}
