#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "dirac/linalg.hpp"
#include "dirac/resolvent_hs.hpp"

using namespace dirac;

namespace {

const Field zero = [](double) { return 0.0; };

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    const double h = (b - a) / (2 * panels);
    double s = f(a) + f(b);
    for (int i = 1; i < 2 * panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

TEST(Resolvent, ZeroMatrixGivesScalar) {
    Grid g;
    g.n = 3;
    g.dx = 1.0;
    DiracMatrix H;
    H.grid = g;
    H.diag = Eigen::VectorXd::Zero(6);
    H.upper = Eigen::VectorXcd::Zero(5);
    const Eigen::MatrixXcd X = resolvent(H, I);
    EXPECT_LE((X - I * Eigen::MatrixXcd::Identity(6, 6)).norm(), 1e-15);
}

TEST(Resolvent, NormBoundAndEigenConsistency) {
    const Grid g = make_line_grid(2.0, 0.1);
    const DiracMatrix H = assemble_line(g, [](double x) { return x; }, [](double x) { return 0.3 * x; });
    const cplx z(0.4, 0.7);
    const Eigen::MatrixXcd X = resolvent(H, z);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(X);
    EXPECT_LE(svd.singularValues()(0), 1.0 / 0.7 + 1e-10);
    const EigenSystem es = eigensystem(H);
    for (int k = 0; k < es.count(); k += 7) {
        const Eigen::VectorXcd v = es.vector(k);
        EXPECT_LE((X * v - v / (es.values(k) - z)).norm(), 1e-10);
    }
}

TEST(Kernel, ClosedFormAtBoundaryPoints) {
    const double e = std::exp(-1.0);
    Eigen::Matrix2cd a, b;
    a << 0, 1, 0, 1;
    b << 0, 0, -1, 1;
    EXPECT_LE((free_halfline_kernel(1.0, 0.0) - I * e * a).norm(), 1e-15);
    EXPECT_LE((free_halfline_kernel(0.0, 1.0) - I * e * b).norm(), 1e-15);
    EXPECT_NEAR(std::abs(free_halfline_kernel(1.0, 0.0)(0, 1)), 0.367879, 1e-6);
}

TEST(Kernel, FrobeniusNormIncludesImageTerm) {
    // at (1,0) two entries of modulus 1/e survive
    EXPECT_NEAR(free_halfline_kernel(1.0, 0.0).squaredNorm(), 2.0 * std::exp(-2.0), 1e-15);
    for (double x1 : {0.3, 1.0, 2.5})
        for (double x2 : {0.1, 0.7, 4.0}) {
            const double expect = std::exp(-2.0 * std::abs(x1 - x2)) + std::exp(-2.0 * (x1 + x2));
            EXPECT_NEAR(free_halfline_kernel(x1, x2).squaredNorm(), expect, 1e-13);
        }
}

TEST(Kernel, SolvesTheResolventEquation) {
    // (sigma1 (-i d/dx1) - i) K = 0 off the diagonal, psi1 row vanishes at 0,
    // jump i sigma1 across x1 = x2
    const double h = 1e-5, x2 = 0.8;
    for (double x1 : {0.2, 0.5, 1.3, 3.0}) {
        const Eigen::Matrix2cd d = (free_halfline_kernel(x1 + h, x2) - free_halfline_kernel(x1 - h, x2)) / (2 * h);
        const Eigen::Matrix2cd r = sigma1() * (-I * d) - I * free_halfline_kernel(x1, x2);
        EXPECT_LE(r.cwiseAbs().maxCoeff(), 1e-8) << x1;
    }
    for (double y : {0.1, 1.0, 3.0}) {
        EXPECT_EQ(free_halfline_kernel(0.0, y).row(0).norm(), 0.0);
        const Eigen::Matrix2cd jump = free_halfline_kernel(y + 1e-12, y) - free_halfline_kernel(y - 1e-12, y);
        EXPECT_LE((jump - I * sigma1()).cwiseAbs().maxCoeff(), 1e-9);
    }
    EXPECT_THROW(free_halfline_kernel(1.0, 1.0), DomainError);
}

TEST(Kernel, DiscreteColumnsConverge) {
    const KernelCheck a = kernel_check(0.02, 12.0);
    const KernelCheck b = kernel_check(0.01, 12.0);
    EXPECT_LT(b.max_error, a.max_error);
    EXPECT_LE(b.max_error, 0.02);
    EXPECT_GT(a.max_error / b.max_error, 1.8);
}

TEST(HS, FreeLineUnitWindow) {
    const Grid g = make_line_grid(20.0, 0.01);
    const DiracMatrix H = assemble_line(g, zero, zero);
    // continuum HS^2 of the unit window by nested Simpson on e^{-2|x-y|}
    auto inner = [](double x) {
        auto k = [x](double y) { return std::exp(-2.0 * std::abs(x - y)); };
        return simpson(k, x - 25.0, x, 1000) + simpson(k, x, x + 25.0, 1000);
    };
    const double oracle = std::sqrt(simpson(inner, -0.5, 0.5, 40));
    EXPECT_NEAR(oracle, 1.0, 1e-6);
    EXPECT_NEAR(hs_window(H, {-0.5, 0.5}), oracle, 0.01);
}

TEST(HS, FreeHalfLineExactIntegral) {
    const Grid g = make_halfline_grid(20.0, 0.01);
    const DiracMatrix H = assemble_halfline(g, zero, zero, 0.0, 0.0, 0.0);
    auto inner = [](double x) {
        auto k = [x](double y) { return std::exp(-2.0 * std::abs(x - y)) + std::exp(-2.0 * (x + y)); };
        return simpson(k, 0.0, x, 500) + simpson(k, x, x + 25.0, 1000);
    };
    const double exact = simpson(inner, 1.0, 2.0, 40);
    EXPECT_NEAR(exact, 1.0, 1e-6);
    const double v = hs_window(H, {1.0, 2.0});
    EXPECT_NEAR(v * v, exact, 2e-3);
    // the reference value without the image term, within its stated 3% band
    EXPECT_NEAR(v * v, 0.970745, 0.03 * 0.970745);
    EXPECT_LE(v, std::sqrt(1.0) + 2e-3);
}

TEST(HS, HalfLineWindowsNearOriginRefused) {
    const Grid g = make_halfline_grid(10.0, 0.05);
    const DiracMatrix H = assemble_halfline(g, zero, zero, 0.5);
    EXPECT_THROW(hs_window(H, {0.5, 1.5}), DomainError);
    EXPECT_THROW(hs_window(H, {2.0, 50.0}), DomainError);
}

TEST(HS, AdditivityAndMonotonicity) {
    const Grid g = make_line_grid(10.0, 0.02);
    const DiracMatrix H = assemble_line(g, [](double x) { return 0.5 * x; }, zero);
    const double a = hs_window(H, {-1.0, 0.3}), b = hs_window(H, {0.3, 2.0}), ab = hs_window(H, {-1.0, 2.0});
    EXPECT_NEAR(ab * ab, a * a + b * b, 1e-12 * ab * ab);
    EXPECT_LE(a, ab);
    EXPECT_LE(b, ab);
}

TEST(HS, SyntheticFit) {
    const std::vector<Interval> w = centered_windows({0.5, 1, 2, 4, 8});
    std::vector<double> v;
    for (const auto& i : w) v.push_back(std::sqrt(i.width()));
    const HSScan s = fit_scan(w, v);
    EXPECT_NEAR(s.fit_exponent, 0.5, 1e-12);
    EXPECT_NEAR(s.fit_constant, 1.0, 1e-12);
    EXPECT_NEAR(s.constant_spread(), 1.0, 1e-12);
    EXPECT_THROW(fit_scan({{0, 1}}, {1.0}), DomainError);
}

TEST(HS, FreeLineScanExponent) {
    const Grid g = make_line_grid(20.0, 0.02);
    const HSScan s = hs_scan(assemble_line(g, zero, zero), centered_windows({0.5, 1, 2, 4, 8}));
    EXPECT_NEAR(s.fit_exponent, 0.5, 0.02);
    for (std::size_t i = 0; i < s.widths.size(); ++i)
        EXPECT_NEAR(s.hs_values[i], free_line_hs(s.widths[i]), 0.03 * free_line_hs(s.widths[i]));
}

TEST(HS, LinearFieldScanExponent) {
    PotentialSpec s;
    s.v2.kind = Tail::Kind::Linear;
    s.a2.kind = Tail::Kind::Linear;
    s.a2.slope = 0.5;
    s.a2.ramp_power = 2;
    const Grid g = make_line_grid(20.0, 0.02);
    const HSScan sc = hs_scan(assemble_line(g, s), centered_windows({0.5, 1, 2, 4, 8}));
    EXPECT_NEAR(sc.fit_exponent, 0.5, 0.05);
    EXPECT_LE(sc.constant_spread(), 1.3);
}
