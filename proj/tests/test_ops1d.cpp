#include <gtest/gtest.h>

#include "support.hpp"

using namespace dles;
using fixtures::max_abs;
using fixtures::max_abs_diff;

namespace {
const double two_pi = 2.0 * std::numbers::pi;
}

TEST(Diff1D, ConstantsAndClosedForm) {
    const Grid1D g(64, two_pi);
    Field1D c(g, Stagger::center());
    for (auto& x : c.values()) {
        x = 3.5;
    }
    EXPECT_EQ(max_abs(diff_1d(c)), 0.0);
    EXPECT_EQ(max_abs_diff(interp_1d(c), Field1D::from_function(g, Stagger::face(0), [](auto&) { return 3.5; })),
              0.0);

    const double h = g.spacing();
    const Field1D u = Field1D::from_function(g, Stagger::center(), [](const auto& x) { return std::sin(x[0]); });
    const Field1D du = diff_1d(u);
    EXPECT_EQ(du.location(), Stagger::face(0));
    for (std::size_t i = 0; i < du.size(); ++i) {
        EXPECT_NEAR(du[i], 2.0 / h * std::sin(h / 2) * std::cos(du.coordinate(0, i)), 1e-13);
    }
}

TEST(Diff1D, SecondDifferenceAndCenteredFirst) {
    const Grid1D g(11, 3.0);
    const double h = g.spacing();
    const Field1D u = fixtures::random_1d(g, Stagger::center(), 7);
    const Field1D dd = diff_1d(diff_1d(u));
    const Field1D de = diff_1d(interp_1d(u));
    EXPECT_EQ(dd.location(), Stagger::center());
    for (std::ptrdiff_t i = 0; i < 11; ++i) {
        EXPECT_NEAR(dd.at({i}), (u.at({i + 1}) - 2 * u.at({i}) + u.at({i - 1})) / (h * h), 1e-12);
        EXPECT_NEAR(de.at({i}), (u.at({i + 1}) - u.at({i - 1})) / (2 * h), 1e-13);
    }
}

TEST(Interp1D, DeltaSpreadsToNeighbours) {
    const Grid1D g(8, 1.0);
    Field1D u(g, Stagger::center());
    u[3] = 1.0;
    const Field1D e = interp_1d(u);
    EXPECT_EQ(e[2], 0.5);
    EXPECT_EQ(e[3], 0.5);
    EXPECT_EQ(max_abs(e), 0.5);
}

TEST(TwoGridFilter1D, MeanOfThreeAndConstants) {
    const GridPair p = make_grid_pair(9, 3, 1.0);
    Field1D u(p.fine_1d(), Stagger::center());
    u[0] = 1.0;
    u[1] = 2.0;
    u[2] = 3.0;
    EXPECT_EQ(twogrid_filter_1d(p, u)[0], 2.0);
    Field1D c = Field1D::from_function(p.fine_1d(), Stagger::face(0), [](auto&) { return -1.25; });
    const Field1D fc = twogrid_filter_1d(p, c);
    EXPECT_EQ(fc.size(), 3u);
    for (double x : fc.values()) {
        EXPECT_DOUBLE_EQ(x, -1.25);
    }
}

TEST(TwoGridFilter1D, RejectsForeignGrid) {
    const GridPair p = make_grid_pair(9, 3, 1.0);
    EXPECT_THROW(twogrid_filter_1d(p, Field1D(Grid1D(10, 1.0), Stagger::center())), Error);
    EXPECT_THROW(twogrid_filter_1d(p, Field1D(Grid1D(9, 2.0), Stagger::center())), Error);
}

TEST(TwoGridFilter1D, PreservesMean) {
    const GridPair p = make_grid_pair(6561, 243, two_pi);
    const Field1D u = fixtures::random_1d(p.fine_1d(), Stagger::center(), 11);
    const Field1D f = twogrid_filter_1d(p, u);
    double mf = 0, mc = 0;
    for (double x : u.values()) {
        mf += x;
    }
    for (double x : f.values()) {
        mc += x;
    }
    EXPECT_NEAR(mc / 243, mf / 6561, 1e-13 * std::max(1.0, std::abs(mf / 6561)));
}

// the coarse difference equals the filtered fine difference, and also the fine
// difference of the fine-grid smoothed field, all at coarse points
TEST(FilterSwap1D, ThreeWayEquality) {
    for (auto [nf, nc] : {std::pair{15, 5}, {81, 27}, {6561, 243}, {6561, 729}}) {
        const GridPair p = make_grid_pair(nf, nc, two_pi);
        for (Stagger loc : {Stagger::center(), Stagger::face(0)}) {
            for (std::uint64_t seed = 1; seed <= 3; ++seed) {
                const Field1D u = fixtures::random_1d(p.fine_1d(), loc, seed);
                const Field1D coarse = diff_1d(restrict_1d(p, u));
                const Field1D swapped = twogrid_filter_1d(p, diff_1d(u));
                const Field1D smoothed = restrict_1d(p, diff_1d(twogrid_smooth_1d(p, u)));
                const double scale = max_abs(coarse);
                EXPECT_LE(max_abs_diff(coarse, swapped), 1e-13 * scale);
                EXPECT_LE(max_abs_diff(coarse, smoothed), 1e-13 * scale);
            }
        }
    }
}

TEST(TophatOracle, ClosedForms) {
    auto c = [](double) { return 2.5; };
    EXPECT_NEAR(tophat_filter_analytic(c, 0.3, 1.0), 2.5, 1e-15);
    auto s = [](double x) { return std::sin(x); };
    EXPECT_NEAR(tophat_filter_analytic(s, 0.4, 0.0), 0.0, 1e-16);
    const double h = 0.1, x = std::numbers::pi / 2;
    EXPECT_NEAR(tophat_filter_analytic(s, h, x), std::sin(h / 2) / (h / 2) * std::sin(x), 1e-14);
    EXPECT_THROW(tophat_filter_analytic(s, h, x, 32), Error);
}

TEST(TophatOracle, TwoGridFilterOfAveragesIsCoarseAverage) {
    // f^H u = f^{h->H} f^h u for a closed-form u
    const GridPair p = make_grid_pair(45, 9, two_pi);
    auto u = [](double x) { return std::sin(x) + 0.3 * std::cos(3 * x); };
    Field1D fh(p.fine_1d(), Stagger::center());
    for (std::size_t i = 0; i < fh.size(); ++i) {
        fh[i] = tophat_filter_analytic(u, p.fine_spacing(), fh.coordinate(0, i));
    }
    const Field1D two = twogrid_filter_1d(p, fh);
    for (std::size_t I = 0; I < two.size(); ++I) {
        EXPECT_NEAR(two[I], tophat_filter_analytic(u, p.coarse_spacing(), two.coordinate(0, I), 1024), 1e-12);
    }
}

// delta^h f^h u - f^h du/dx decays like h^2 for u = sin
TEST(TophatOracle, NonCommutationDecaysAtSecondOrder) {
    auto u = [](double x) { return std::sin(x); };
    auto du = [](double x) { return std::cos(x); };
    std::vector<double> hs, errs;
    for (int n : {16, 32, 64, 128}) {
        const double h = two_pi / n;
        double err = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = (i + 1) * h;
            const double lhs =
                (tophat_filter_analytic(u, h, x + h / 2) - tophat_filter_analytic(u, h, x - h / 2)) / h;
            err = std::max(err, std::abs(lhs - tophat_filter_analytic(du, h, x)));
        }
        hs.push_back(h);
        errs.push_back(err);
    }
    for (std::size_t k = 1; k < hs.size(); ++k) {
        const double slope = std::log(errs[k - 1] / errs[k]) / std::log(hs[k - 1] / hs[k]);
        EXPECT_GE(slope, 1.9);
        EXPECT_LE(slope, 2.1);
    }
}
