#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dirac/lattice.hpp"
#include "dirac/linalg.hpp"

using namespace dirac;

namespace {

const Field zero = [](double) { return 0.0; };

std::vector<double> sorted(const Eigen::VectorXd& v) {
    std::vector<double> s(v.data(), v.data() + v.size());
    std::sort(s.begin(), s.end());
    return s;
}

}  // namespace

TEST(Grid, StaggeredLayout) {
    const Grid g = make_line_grid(5.0, 0.1);
    EXPECT_NEAR(g.node(0) + g.node(g.n - 1), 0.0, 1e-12);
    for (int m = 0; m + 1 < g.sites(); ++m) EXPECT_NEAR(g.site_pos(m + 1) - g.site_pos(m), 0.05, 1e-12);
    EXPECT_EQ(Grid::component(0), 2);
    EXPECT_EQ(Grid::component(1), 1);
    const Grid h = make_halfline_grid(5.0, 0.1);
    EXPECT_NEAR(h.left_wall(), 0.0, 1e-15);
    EXPECT_GT(h.site_pos(0), 0.0);
}

TEST(Lattice, HermitianByConstruction) {
    const Grid g = make_line_grid(3.0, 0.1);
    auto V = [](double x) { return std::sin(x) + 0.3 * x; };
    auto A = [](double x) { return std::exp(-x * x); };
    const Eigen::MatrixXcd H = assemble_line(g, V, A, 0.7, 0.4).dense();
    EXPECT_EQ((H - H.adjoint()).norm(), 0.0);
    const Grid h = make_halfline_grid(3.0, 0.1);
    const Eigen::MatrixXcd K = assemble_halfline(h, V, A, 1.5, 0.2).dense();
    EXPECT_EQ((K - K.adjoint()).norm(), 0.0);
}

TEST(Lattice, PeriodicFreeDispersion) {
    const int n = 64;
    const double dx = 0.1;
    const EigenSystem es = eigensystem(assemble_periodic_free(n, dx));
    std::vector<double> symbol;
    for (int q = 0; q < n; ++q) {
        const double p = 2.0 * std::numbers::pi * q / (n * dx);
        const double e = (2.0 / dx) * std::abs(std::sin(p * dx / 2.0));
        symbol.push_back(e);
        symbol.push_back(-e);
    }
    std::sort(symbol.begin(), symbol.end());
    const std::vector<double> ev = sorted(es.values);
    ASSERT_EQ(ev.size(), symbol.size());
    for (std::size_t i = 0; i < ev.size(); ++i) EXPECT_NEAR(ev[i], symbol[i], 1e-8);
    EXPECT_NEAR(ev.back(), 2.0 / dx, 1e-8);
    EXPECT_NEAR(ev.front(), -2.0 / dx, 1e-8);
}

TEST(Lattice, MassiveRingLevels) {
    for (double dx : {0.2, 0.1, 0.05}) {
        const int n = static_cast<int>(std::round(20.0 / dx));
        const std::vector<double> ev = sorted(eigensystem(assemble_periodic_free(n, dx, 1.0)).values);
        std::vector<double> mag;
        for (double e : ev) mag.push_back(std::abs(e));
        std::sort(mag.begin(), mag.end());
        EXPECT_NEAR(mag[0], 1.0, 1e-8);  // zero momentum is on every periodic grid
        // first nonzero momentum 2 pi / (n dx), twice degenerate, both signs
        const double s = 2.0 / dx * std::sin(std::numbers::pi / n);
        EXPECT_NEAR(mag[2], std::sqrt(1.0 + s * s), 1e-8);
        EXPECT_NEAR(mag[5], std::sqrt(1.0 + s * s), 1e-8);
    }
}

TEST(Lattice, SpectrumSymmetricForFreeLine) {
    const Grid g = make_line_grid(4.0, 0.05);
    const std::vector<double> ev = sorted(eigensystem(assemble_line(g, zero, zero)).values);
    for (std::size_t i = 0; i < ev.size(); ++i) EXPECT_NEAR(ev[i], -ev[ev.size() - 1 - i], 1e-9);
    EXPECT_LE(ev.back(), 2.0 / g.dx + 1e-12);
}

TEST(Lattice, HalfLineBesselLevel) {
    // k = -1/2: psi2 = sqrt(x) J0(Ex) with psi2(L) = 0, so E1 = j_{0,1} / L
    const double exact = 2.404825557695773 / 10.0;
    std::vector<double> err;
    for (double dx : {0.04, 0.02, 0.01}) {
        const Grid g = make_halfline_grid(10.0, dx);
        const EigenSystem es = eigensystem(assemble_halfline(g, zero, zero, -0.5), 0.0, 1.0);
        double m = 1e9;
        for (int k = 0; k < es.count(); ++k) m = std::min(m, es.values(k));
        err.push_back(std::abs(m - exact));
    }
    EXPECT_LE(err.back(), 2e-4);
    for (double o : observed_orders(err)) EXPECT_GT(o, 0.9);
}

TEST(Lattice, HalfLineChiralSymmetry) {
    // no potential and no mass: sigma3 anticommutes with h_k, spectrum is +-symmetric
    const Grid g = make_halfline_grid(6.0, 0.05);
    for (double k : {-1.5, -0.5, 0.5, 1.5, 2.5}) {
        const std::vector<double> a = sorted(eigensystem(assemble_halfline(g, zero, zero, k)).values);
        for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], -a[a.size() - 1 - i], 1e-9) << k;
    }
}

TEST(Lattice, DirichletChannelZeroBoundary) {
    const Grid g = make_halfline_grid(5.0, 0.02);
    const EigenSystem es = eigensystem(assemble_halfline(g, zero, zero, 0.0, 0.0, 0.0), -3.0, 3.0);
    ASSERT_GE(es.count(), 8);
    for (int k = 0; k < es.count(); ++k) {
        const Eigen::VectorXcd v = es.vector(k);
        // psi1 vanishes at the wall; one spacing away it is of order |E| dx
        EXPECT_LE(std::abs(v(1)), 2.0 * std::abs(es.values(k)) * g.dx * v.cwiseAbs().maxCoeff()) << k;
    }
}

TEST(Lattice, AlphaRejectedForNonzeroChannel) {
    const Grid g = make_halfline_grid(5.0, 0.1);
    EXPECT_THROW(assemble_halfline(g, zero, zero, 0.5, 0.0, 0.3), ConfigError);
    EXPECT_THROW(assemble_halfline(g, zero, zero, 0.7), ConfigError);
    EXPECT_NO_THROW(assemble_halfline(g, zero, zero, 0.0, 0.0, 0.3));
}

TEST(Lattice, TwoSiteClosedForm) {
    Grid g;
    g.geometry = Geometry::Line;
    g.n = 1;
    g.dx = 0.5;
    const double c = 0.8;
    const DiracMatrix H = assemble_line(g, [c](double) { return c; }, zero);
    const std::vector<double> ev = sorted(eigensystem(H).values);
    const double coupling = std::abs(H.upper(0));
    EXPECT_NEAR(coupling, 1.0 / g.dx, 1e-14);
    EXPECT_NEAR(ev[0], c - coupling, 1e-12);
    EXPECT_NEAR(ev[1], c + coupling, 1e-12);
}

TEST(Lattice, EigenResidualAndTrace) {
    const Grid g = make_line_grid(4.0, 0.05);
    auto V = [](double x) { return 0.5 * x; };
    auto A = [](double x) { return 0.25 * std::tanh(x); };
    const DiracMatrix H = assemble_line(g, V, A, 0.3, 0.2);
    const EigenSystem es = eigensystem(H);
    const double hn = H.dense().cwiseAbs().colwise().sum().maxCoeff();
    EXPECT_LE(es.max_residual(H), 1e-10 * hn);
    EXPECT_NEAR(es.values.sum(), H.diag.sum(), 1e-8);
}

TEST(Lattice, WindowedEigensystemMatchesFull) {
    const Grid g = make_halfline_grid(8.0, 0.02);
    const DiracMatrix H = assemble_halfline(g, [](double x) { return x; }, zero, 1.5);
    const EigenSystem full = eigensystem(H);
    const EigenSystem win = eigensystem(H, -2.0, 1.0);
    const std::vector<int> idx = full.indices_in({-2.0, 1.0});
    ASSERT_EQ(static_cast<int>(idx.size()), win.count());
    for (int i = 0; i < win.count(); ++i) EXPECT_NEAR(win.values(i), full.values(idx[i]), 1e-10);
    EXPECT_LE(win.max_residual(H), 1e-9);
}

TEST(Lattice, ProjectorAxioms) {
    const Grid g = make_line_grid(2.0, 0.1);
    const EigenSystem es = eigensystem(assemble_line(g, [](double x) { return x; }, zero));
    const Eigen::MatrixXcd P = spectral_projector(es, {-3.0, 2.0});
    EXPECT_LE((P * P - P).norm(), 1e-10);
    EXPECT_LE((P - P.adjoint()).norm(), 1e-10);
    const int N = es.dim();
    EXPECT_LE((spectral_projector(es, {-1e3, 1e3}) - Eigen::MatrixXcd::Identity(N, N)).norm(), 1e-10);
    EXPECT_EQ(spectral_projector(es, {1e3, 2e3}).norm(), 0.0);
}
