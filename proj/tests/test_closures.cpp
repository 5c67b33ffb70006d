#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace dles;
using fixtures::max_abs;
using fixtures::max_abs_diff;

namespace {

Mat3 random_matrix(std::mt19937_64& gen) {
    std::normal_distribution<double> d;
    Mat3 m;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            m(i, j) = d(gen);
        }
    }
    return m;
}

Mat3 random_rotation(std::mt19937_64& gen) {
    Eigen::HouseholderQR<Mat3> qr(random_matrix(gen));
    Mat3 q = qr.householderQ();
    if (q.determinant() < 0) {
        q.col(0) *= -1.0;
    }
    return q;
}

double rel(const Mat3& a, const Mat3& b, double scale) { return (a - b).norm() / std::max(scale, 1e-300); }

} // namespace

TEST(Collocation, ConstantAndShear) {
    const Grid3D g(12);
    VectorField w(g);
    for (int i = 0; i < 3; ++i) {
        for (auto& x : w[i].values()) {
            x = 1.0 + i;
        }
    }
    const CenterTensor g0 = collocate_gradient(w);
    for (const auto& f : g0.c) {
        EXPECT_EQ(f.location(), Stagger::center());
        EXPECT_EQ(max_abs(f), 0.0);
    }

    // w1 = a x2 on the sawtooth; away from the seam G12 = a exactly
    const double a = 0.7;
    w = VectorField(g);
    w[0] = Field3D::from_function(g, Stagger::face(0), [&](const auto& x) { return a * x[1]; });
    const CenterTensor gs = collocate_gradient(w);
    for (std::size_t n = 0; n < gs.size(); ++n) {
        const auto idx = gs(0, 1).unravel(n);
        if (idx[1] >= 1 && idx[1] + 2 <= 11) {
            EXPECT_NEAR(gs(0, 1)[n], a, 1e-13);
        }
        EXPECT_EQ(gs(1, 0)[n], 0.0);
    }
    const PointGradient pg{gs.at(40)};
    EXPECT_EQ((pg.S() + pg.R() - pg.G).norm(), 0.0);
}

TEST(TensorBasis, PureStrainAndPureRotation) {
    std::mt19937_64 gen(3);
    const Mat3 m = random_matrix(gen);
    const PointGradient strain{0.5 * (m + m.transpose())};
    const TensorBasis bs = tensor_basis(strain);
    for (int k = 0; k < 10; ++k) {
        if (k != 0 && k != 2) {
            EXPECT_LE(bs.A[k].norm(), 1e-14) << "A" << k + 1;
        }
    }
    EXPECT_GT(bs.A[2].norm(), 0.1);
    for (const auto& b : bs.B) {
        EXPECT_LE(b.norm(), 1e-14);
    }
    EXPECT_EQ(bs.lambda[1], 0.0);
    EXPECT_EQ(bs.lambda[3], 0.0);
    EXPECT_EQ(bs.lambda[4], 0.0);

    const PointGradient rot{0.5 * (m - m.transpose())};
    const TensorBasis br = tensor_basis(rot);
    for (int k = 0; k < 10; ++k) {
        if (k != 3) {
            EXPECT_LE(br.A[k].norm(), 1e-14) << "A" << k + 1;
        }
    }
    EXPECT_GT(br.A[3].norm(), 0.1);
    EXPECT_EQ(br.lambda[0], 0.0);
    EXPECT_EQ(br.lambda[2], 0.0);
}

TEST(TensorBasis, SymmetryClassesAndTraces) {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 100; ++trial) {
        const PointGradient g{random_matrix(gen)};
        const TensorBasis b = tensor_basis(g);
        const double s2 = g.G.squaredNorm();
        for (int k = 0; k < 10; ++k) {
            const double sc = std::max(b.A[k].norm(), 1e-300);
            EXPECT_LE((b.A[k] - b.A[k].transpose()).norm() / sc, 1e-14) << "A" << k + 1;
        }
        for (int k = 0; k < 6; ++k) {
            const double sc = std::max(b.B[k].norm(), 1e-300);
            EXPECT_LE((b.B[k] + b.B[k].transpose()).norm() / sc, 1e-14) << "B" << k + 1;
        }
        // dev(S^2), dev(R^2), dev(SR^2 + R^2S), dev(S^2R^2 + R^2S^2) with degrees 2, 2, 3, 4
        const std::pair<int, double> devs[] = {{2, 2.0}, {3, 2.0}, {5, 3.0}, {8, 4.0}};
        for (auto [k, degree] : devs) {
            EXPECT_LE(std::abs(b.A[k].trace()), 1e-14 * std::pow(s2, degree / 2)) << "A" << k + 1;
        }
    }
}

TEST(TensorBasis, OrthogonalEquivariance) {
    std::mt19937_64 gen(29);
    for (int trial = 0; trial < 100; ++trial) {
        const Mat3 G = random_matrix(gen);
        const Mat3 Q = random_rotation(gen);
        const TensorBasis b = tensor_basis(PointGradient{G});
        const TensorBasis bq = tensor_basis(PointGradient{Q * G * Q.transpose()});
        for (int k = 0; k < 10; ++k) {
            EXPECT_LE(rel(bq.A[k], Q * b.A[k] * Q.transpose(), std::max(1.0, b.A[k].norm())), 1e-12);
        }
        for (int k = 0; k < 6; ++k) {
            EXPECT_LE(rel(bq.B[k], Q * b.B[k] * Q.transpose(), std::max(1.0, b.B[k].norm())), 1e-12);
        }
        for (int k = 0; k < 5; ++k) {
            EXPECT_NEAR(bq.lambda[k], b.lambda[k], 1e-12 * std::max(1.0, std::abs(b.lambda[k])));
        }
    }
}

TEST(TensorBasisModel, ZeroAndEddyViscosity) {
    const Grid3D g(9);
    const PoissonSolver3D s(g);
    const VectorField w = fixtures::smooth_solenoidal(s, 4, 4);
    const double delta = g.spacing();

    const TensorField zero = tensor_basis_model(w, BasisCoefficients::constant({}, delta));
    EXPECT_TRUE(zero.valid_layout());
    EXPECT_EQ(max_abs(zero), 0.0);

    const double nu_t = 0.01;
    const CenterTensor m = tensor_basis_model_centered(w, BasisCoefficients::eddy_viscosity(nu_t, delta));
    const CenterTensor grad = collocate_gradient(w);
    for (std::size_t n = 0; n < m.size(); ++n) {
        const Mat3 S = PointGradient{grad.at(n)}.S();
        EXPECT_LE((m.at(n) + 2 * nu_t * S).norm(), 1e-14 * std::max(1.0, S.norm()));
    }
}

TEST(TensorBasisModel, SymmetricWithoutSkewPart) {
    const Grid3D g(9);
    const VectorField w = fixtures::random_vector(g, 8);
    BasisWeights wt;
    for (int k = 0; k < 10; ++k) {
        wt.alpha[k] = 0.1 * (k + 1);
    }
    const TensorField m = tensor_basis_model(w, BasisCoefficients::constant(wt, 0.2));
    EXPECT_TRUE(m.valid_layout());
    const double scale = max_abs(m);
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            EXPECT_LE(max_abs_diff(m(i, j), m(j, i)), 1e-13 * scale);
        }
    }
    BasisWeights skew;
    skew.beta[0] = 1.0;
    const TensorField n = tensor_basis_model(w, BasisCoefficients::constant(skew, 0.2));
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(max_abs(n(i, i)), 0.0);
        for (int j = i + 1; j < 3; ++j) {
            Field3D sum = n(i, j);
            sum += n(j, i);
            EXPECT_LE(max_abs(sum), 1e-14 * max_abs(n));
            EXPECT_GT(max_abs(n(i, j)), 0.1 * max_abs(n));
        }
    }
}

TEST(TensorBasisModel, CoefficientsSeeInvariants) {
    const Grid3D g(6);
    const VectorField w = fixtures::random_vector(g, 2);
    int calls = 0;
    BasisCoefficients c{[&](const std::array<double, 5>& lam) {
                            ++calls;
                            EXPECT_GE(lam[0], 0.0);
                            EXPECT_LE(lam[1], 0.0);
                            return BasisWeights{};
                        },
                        g.spacing()};
    tensor_basis_model(w, c);
    EXPECT_EQ(calls, 216);
}

TEST(Smagorinsky1D, SignAndScaling) {
    const Grid1D g(32, 1.0);
    const Field1D c = Field1D::from_function(g, Stagger::center(), [](auto&) { return 2.0; });
    EXPECT_EQ(max_abs(smagorinsky_1d(c, 0.2, 0.1)), 0.0);
    const Field1D w = fixtures::random_1d(g, Stagger::center(), 1);
    const Field1D m1 = smagorinsky_1d(w, 0.1, 0.1);
    const Field1D m2 = smagorinsky_1d(w, 0.2, 0.1);
    const Field1D dw = diff_1d(w);
    for (std::size_t i = 0; i < m1.size(); ++i) {
        EXPECT_LE(m1[i] * dw[i], 0.0);
        EXPECT_NEAR(m2[i], 4.0 * m1[i], 1e-12 * std::abs(m2[i]));
    }
}
