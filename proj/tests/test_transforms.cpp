#include <gtest/gtest.h>

#include <cmath>

#include "dirac/linalg.hpp"
#include "dirac/transforms.hpp"

using namespace dirac;

namespace {

Tail linear(double slope, int power = 1) {
    Tail t;
    t.kind = Tail::Kind::Linear;
    t.slope = slope;
    t.ramp_power = power;
    return t;
}

PotentialSpec field(double v, double a, Geometry g = Geometry::Line) {
    PotentialSpec s;
    s.geometry = g;
    s.v2 = linear(v);
    if (a != 0.0) s.a2 = linear(a);
    return s;
}

double block_error(const Eigen::Matrix2cd& A, const Eigen::Matrix2cd& B) { return (A - B).cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Gauge, ZeroPotentialIsIdentity) {
    const Grid g = make_line_grid(3.0, 0.1);
    const NodeBlocks U = gauge_unitary(std::vector<double>(g.n, 0.0), g);
    for (const auto& b : U) EXPECT_EQ(block_error(b, Eigen::Matrix2cd::Identity()), 0.0);
}

TEST(Gauge, ConstantPotentialNodePhase) {
    const Grid g = make_line_grid(3.0, 0.1);
    const NodeBlocks U = gauge_unitary(std::vector<double>(g.n, 1.0), g);
    for (int j = 0; j < g.n; ++j) {
        const double x = g.node(j);
        Eigen::Matrix2cd expect = std::cos(x) * Eigen::Matrix2cd::Identity() + I * std::sin(x) * sigma1();
        EXPECT_LE(block_error(U[j], expect), 1e-12) << x;
    }
}

TEST(Gauge, NodeUnitaryIsUnitary) {
    const Grid g = make_line_grid(5.0, 0.05);
    std::vector<double> V(g.n);
    for (int j = 0; j < g.n; ++j) V[j] = std::sin(g.node(j)) + 0.2 * g.node(j) * g.node(j);
    for (const auto& b : gauge_unitary(V, g))
        EXPECT_LE(block_error(b.adjoint() * b, Eigen::Matrix2cd::Identity()), 1e-12);
}

TEST(Gauge, ChainGaugeIsUnitaryAndInvertible) {
    const Grid g = make_line_grid(3.0, 0.05);
    const ChainGauge U(g, [](double x) { return 1.0 + 0.5 * std::cos(x); });
    Eigen::VectorXcd v = Eigen::VectorXcd::Random(g.sites());
    const Eigen::VectorXcd w = U.apply(v);
    EXPECT_NEAR(w.norm(), v.norm(), 1e-12 * v.norm());
    EXPECT_LE((U.apply(w, true) - v).norm(), 1e-12 * v.norm());
}

TEST(Gauge, CovarianceConvergesAtSecondOrder) {
    // V = g' with g(0) = 0 and g -> 0, so the phase vanishes at both hard walls,
    // whose boundary condition is not gauge covariant
    auto V = [](double x) { return 0.8 * (1.0 - 2.0 * x * x) * std::exp(-x * x); };
    std::vector<double> errs;
    for (double dx : {0.08, 0.04, 0.02}) {
        const GaugeCovarianceReport r = gauge_covariance(make_line_grid(8.0, dx), V, I, 0.1, false);
        errs.push_back(r.chain_error);
    }
    for (double o : observed_orders(errs)) EXPECT_GT(o, 1.8);
}

TEST(Boost, NoVectorTailMeansIdentity) {
    const PotentialSpec s = field(1.0, 0.0);
    const BoostData bd = boost_fields(s, make_line_grid(4.0, 0.1), Hypothesis::H1);
    for (std::size_t j = 0; j < bd.theta.size(); ++j) {
        EXPECT_EQ(bd.theta[j], 0.0);
        EXPECT_EQ(bd.gamma[j], 1.0);
        EXPECT_EQ(block_error(bd.M[j], Eigen::Matrix2cd::Identity()), 0.0);
    }
}

TEST(Boost, ConstantRatioGamma) {
    const PotentialSpec s = field(1.0, 0.5);
    const BoostData bd = boost_fields(s, make_line_grid(6.0, 0.1), Hypothesis::H1);
    const double gamma = 1.0 / std::sqrt(1.0 - 0.25);
    int on_tail = 0;
    for (std::size_t j = 0; j < bd.x.size(); ++j) {
        if (std::abs(bd.x[j]) <= 1.0) continue;  // inside r0 the tails vanish
        EXPECT_NEAR(bd.gamma[j], gamma, 1e-12);
        EXPECT_NEAR(bd.gamma[j], 1.154701, 1e-6);
        EXPECT_NEAR(std::abs(bd.theta_prime[j]), 0.0, 1e-12);
        ++on_tail;
    }
    EXPECT_GT(on_tail, 50);
}

TEST(Boost, BlockInversesExact) {
    PotentialSpec s = field(1.0, 0.5);
    s.a2.ramp_power = 2;
    const BoostData bd = boost_fields(s, make_line_grid(6.0, 0.05), Hypothesis::H1);
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    for (std::size_t j = 0; j < bd.M.size(); ++j) {
        EXPECT_LE(block_error(bd.M[j] * bd.Minv[j], id), 1e-12);
        EXPECT_LE(block_error(bd.expF[j] * bd.expmF[j], id), 1e-12);
        // e^{sigma2 theta/2} squared is cosh theta + sigma2 sinh theta
        const double th = bd.theta[j];
        EXPECT_LE(block_error(bd.expF[j] * bd.expF[j], std::cosh(th) * id + std::sinh(th) * sigma2()), 1e-12);
    }
}

TEST(Boost, RefusesSteepRatio) {
    EXPECT_THROW(boost_fields(field(1.0, 1.5), make_line_grid(4.0, 0.1), Hypothesis::H1), DomainError);
}

TEST(Boost, ZeroRapidityLeavesOperatorUnchanged) {
    const PotentialSpec s = field(1.0, 0.0);
    const Grid g = make_line_grid(4.0, 0.05);
    const DiracMatrix h = assemble_plain(s, g, {0.3, 0.0, 0.2});
    const DiracMatrix ht = assemble_boosted(s, g, {0.3, 0.0, 0.2}, Hypothesis::H1);
    EXPECT_EQ((h.dense() - ht.dense()).norm(), 0.0);
    const ResolventIdentityReport r = verify_resolvent_identity(h, ht, boost_fields(s, g, Hypothesis::H1));
    EXPECT_LE(r.r1, 1e-12);
}

TEST(Boost, ConstantRatioScalesPotential) {
    const PotentialSpec s = field(1.0, 0.5);
    const Grid g = make_line_grid(6.0, 0.1);
    const DiracMatrix ht = assemble_boosted(s, g, {}, Hypothesis::H1);
    const DiracMatrix h = assemble_plain(s, g, {});
    for (int m = 0; m < g.sites(); ++m) {
        const double x = g.site_pos(m);
        if (std::abs(x) < 1.5) continue;  // away from the ramp
        // diagonal: gamma (V - beta A) = V / gamma; the off-diagonal term cancels
        EXPECT_NEAR(ht.diag(m), s.V(x) * std::sqrt(0.75), 1e-10) << x;
    }
    for (int m = 0; m + 1 < g.sites(); ++m) {
        const double x = g.site_pos(m) + 0.25 * g.dx;
        if (std::abs(x) < 1.5) continue;
        EXPECT_NEAR(std::abs(ht.upper(m)), 1.0 / g.dx, 1e-10) << x;
        EXPECT_GT(std::abs(h.upper(m) - ht.upper(m)), 0.0);
    }
}

TEST(Boost, PrimeDirectionScalesVectorPotential) {
    PotentialSpec s;
    s.a2 = linear(1.0);
    s.v2 = linear(0.5);
    const Grid g = make_line_grid(6.0, 0.1);
    const DiracMatrix ht = assemble_boosted(s, g, {}, Hypothesis::H1Prime);
    for (int m = 0; m < g.sites(); ++m) {
        const double x = g.site_pos(m);
        if (std::abs(x) < 1.5) continue;
        EXPECT_NEAR(ht.diag(m), 0.0, 1e-10) << x;
    }
    for (int m = 0; m + 1 < g.sites(); ++m) {
        const double x = g.site_pos(m) + 0.25 * g.dx;
        if (std::abs(x) < 1.5) continue;
        // W = -A / gamma on the bond, entering as -i/dx -+ i W / 2
        const double w = -s.A(x) * std::sqrt(0.75);
        const double expect = (m % 2 == 1) ? -1.0 / g.dx - 0.5 * w : -1.0 / g.dx + 0.5 * w;
        EXPECT_NEAR(ht.upper(m).imag(), expect, 1e-10) << x;
    }
}

TEST(Boost, ResolventIdentityConvergesWithBound) {
    PotentialSpec s = field(1.0, 0.5);
    s.a2.ramp_power = 2;
    std::vector<double> r1;
    for (double dx : {0.04, 0.02, 0.01}) {
        const Grid g = make_line_grid(16.0, dx);
        const ResolventIdentityReport r = verify_resolvent_identity(
            assemble_plain(s, g, {}), assemble_boosted(s, g, {}, Hypothesis::H1), boost_fields(s, g, Hypothesis::H1),
            I, 0.5);
        EXPECT_TRUE(r.bound_ok);
        EXPECT_LE(r.norm_boosted, r.norm_plain * std::exp(0.5 * std::log(3.0)) * (1.0 + 1e-12));
        r1.push_back(r.r1);
    }
    EXPECT_LT(r1[2], r1[1]);
    EXPECT_LT(r1[1], r1[0]);
}

TEST(Boost, FreeIdentityDefectIsFirstOrder) {
    PotentialSpec s = field(1.0, 0.5);
    s.a2.ramp_power = 2;
    std::vector<double> d;
    for (double dx : {0.04, 0.02, 0.01}) {
        const Grid g = make_line_grid(8.0, dx);
        Eigen::VectorXcd phi(g.sites());
        for (int m = 0; m < g.sites(); ++m) {
            const double x = g.site_pos(m);
            phi(m) = std::exp(-0.5 * (x - 2.0) * (x - 2.0)) * (m % 2 ? 1.0 : 0.5);
        }
        d.push_back(lorentz_free_defect(boost_fields(s, g, Hypothesis::H1), g, s, phi));
    }
    for (double o : observed_orders(d)) EXPECT_GT(o, 0.9);
}
