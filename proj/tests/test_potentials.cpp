#include <gtest/gtest.h>

#include <cmath>

#include "dirac/potentials.hpp"

using namespace dirac;

namespace {

Tail linear(double slope, double r0 = 1.0, int power = 1) {
    Tail t;
    t.kind = Tail::Kind::Linear;
    t.slope = slope;
    t.r0 = r0;
    t.ramp_power = power;
    return t;
}

PotentialSpec tails(double v, double a, int a_power = 1) {
    PotentialSpec s;
    s.v2 = linear(v);
    s.a2 = linear(a, 1.0, a_power);
    return s;
}

}  // namespace

TEST(Potentials, LinearTailEvaluatesPastRamp) {
    PotentialSpec s;
    s.v2 = linear(1.0);
    s.v2.ramp_width = 0.5;
    EXPECT_DOUBLE_EQ(s.V(2.0), 2.0);
    EXPECT_DOUBLE_EQ(s.V(-2.0), -2.0);
}

TEST(Potentials, BoxVanishesOutsideSupport) {
    PotentialSpec s;
    Piece box;
    box.kind = Piece::Kind::Box;
    box.center = 0.5;
    box.width = 1.0;
    box.amplitude = 3.0;
    s.v1.push_back(box);
    EXPECT_DOUBLE_EQ(s.V(10.0), 0.0);
    EXPECT_DOUBLE_EQ(s.V(0.5), 3.0);
    EXPECT_LE(box.support_radius(), 1.0);
}

TEST(Potentials, ConstantRatioTails) {
    const PotentialSpec s = tails(1.0, 0.5);
    const Grid g = make_line_grid(10.0, 0.05);
    const SampledFields f = sample_potential(s, g);
    int checked = 0;
    for (std::size_t i = 0; i < f.x.size(); ++i) {
        if (f.V2[i] == 0.0) continue;
        EXPECT_NEAR(f.A2[i] / f.V2[i], 0.5, 1e-14);
        ++checked;
    }
    EXPECT_GT(checked, 100);
}

TEST(Potentials, SampledFieldsDecompose) {
    PotentialSpec s = tails(1.0, 0.3);
    Piece bump;
    bump.center = 0.4;
    bump.width = 0.3;
    bump.amplitude = -1.2;
    s.v1.push_back(bump);
    s.a1.push_back(bump);
    const SampledFields f = sample_potential(s, make_line_grid(6.0, 0.1));
    for (std::size_t i = 0; i < f.x.size(); ++i) {
        EXPECT_DOUBLE_EQ(f.V[i], s.V1(f.x[i]) + f.V2[i]);
        EXPECT_DOUBLE_EQ(f.A[i], s.A1(f.x[i]) + f.A2[i]);
    }
}

TEST(Potentials, TailsVanishInsideCutoff) {
    Tail kinds[4];
    kinds[0] = linear(2.0, 1.5);
    kinds[1].kind = Tail::Kind::Power;
    kinds[1].exponent = 1.7;
    kinds[1].r0 = 1.5;
    kinds[2].kind = Tail::Kind::Constant;
    kinds[2].value0 = 3.0;
    kinds[2].r0 = 1.5;
    kinds[3].kind = Tail::Kind::Logistic;
    kinds[3].value0 = 2.0;
    kinds[3].r0 = 1.5;
    for (const Tail& t : kinds)
        for (double x = -1.49; x < 1.5; x += 0.01) EXPECT_EQ(t.value(x), 0.0) << x;
}

TEST(Potentials, DerivativeMatchesDifferenceQuotient) {
    Tail t = linear(1.3, 1.0, 2);
    t.ramp_width = 2.0;
    Piece p;
    p.kind = Piece::Kind::RaisedCosine;
    p.width = 1.5;
    const double h = 1e-6;
    for (double x = -4.0; x <= 4.0; x += 0.137) {
        EXPECT_NEAR(t.derivative(x), (t.value(x + h) - t.value(x - h)) / (2 * h), 1e-6) << x;
        EXPECT_NEAR(p.derivative(x), (p.value(x + h) - p.value(x - h)) / (2 * h), 1e-6) << x;
    }
}

TEST(Potentials, HalfLineRejectsNegativeSamples) {
    PotentialSpec s;
    s.geometry = Geometry::HalfLine;
    EXPECT_THROW(sample_potential(s, make_line_grid(5.0, 0.1)), DomainError);
}

TEST(Potentials, H1PassesWithAtanhRapidity) {
    // squared ramp on A2 so the ratio rises continuously from 0
    const HypothesisReport r = check_hypothesis(tails(1.0, 0.5, 2), Hypothesis::H1);
    EXPECT_TRUE(r.passed);
    EXPECT_TRUE(r.support_ok);
    EXPECT_NEAR(r.ratio_sup, 0.5, 1e-12);
    // 0.5 * log(3) written out independently of std::atanh
    EXPECT_NEAR(r.theta_max, 0.5 * std::log((1.0 + 0.5) / (1.0 - 0.5)), 1e-12);
    EXPECT_NEAR(r.theta_max, 0.549306, 1e-6);
}

TEST(Potentials, H1FailsForSteepVectorTail) {
    const HypothesisReport r = check_hypothesis(tails(1.0, 2.0), Hypothesis::H1);
    EXPECT_FALSE(r.passed);
    EXPECT_NEAR(r.ratio_sup, 2.0, 1e-12);
    bool cites = false;
    for (const auto& m : r.messages) cites = cites || m.find("condition ii)") != std::string::npos;
    EXPECT_TRUE(cites);
}

TEST(Potentials, SupportViolationIsReported) {
    PotentialSpec s;
    s.v2 = linear(1.0, 5.0);
    s.a2 = linear(0.5, 1.0);
    const HypothesisReport r = check_hypothesis(s, Hypothesis::H1);
    EXPECT_FALSE(r.support_ok);
    EXPECT_FALSE(r.passed);
}

TEST(Potentials, PassedMatchesDefinition) {
    for (double a : {0.1, 0.5, 0.99, 1.0, 1.5}) {
        const HypothesisReport r = check_hypothesis(tails(1.0, a), Hypothesis::H1);
        EXPECT_EQ(r.passed, r.support_ok && r.ratio_sup < 1.0 && std::isfinite(r.deriv_sup)) << a;
    }
}

TEST(Potentials, ThetaMaxIsAtanhOfRatio) {
    // ramp_power 2 on A makes the ratio vary through the ramp
    for (double a : {0.2, 0.5, 0.8}) {
        const HypothesisReport r = check_hypothesis(tails(1.0, a, 2), Hypothesis::H1);
        ASSERT_TRUE(r.passed);
        EXPECT_NEAR(r.theta_max, std::atanh(r.ratio_sup), 1e-12);
    }
}

TEST(Potentials, PrimeAndPlainCannotBothPass) {
    for (double a : {0.3, 0.9, 1.1, 3.0}) {
        PotentialSpec s = tails(1.0, a);
        const bool h1 = check_hypothesis(s, Hypothesis::H1).passed;
        const bool h1p = check_hypothesis(s, Hypothesis::H1Prime).passed;
        EXPECT_FALSE(h1 && h1p) << a;
    }
}

TEST(Potentials, AuditResolutionIsConfigurable) {
    AuditOptions coarse{20.0, 0.1}, fine{20.0, 0.001};
    const PotentialSpec s = tails(1.0, 0.5, 2);
    EXPECT_NEAR(check_hypothesis(s, Hypothesis::H1, coarse).ratio_sup,
                check_hypothesis(s, Hypothesis::H1, fine).ratio_sup, 1e-12);
}

TEST(Gauges, LandauConstantField) {
    std::vector<double> x;
    for (int i = 0; i <= 40; ++i) x.push_back(-2.0 + 0.1 * i);
    const std::vector<double> A = landau_gauge([](double) { return 1.0; }, x);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(A[i], x[i], 1e-12);
}

TEST(Gauges, LandauSine) {
    std::vector<double> x;
    for (int i = 0; i <= 600; ++i) x.push_back(0.01 * i);
    const std::vector<double> A = landau_gauge([](double s) { return std::sin(s); }, x);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(A[i], 1.0 - std::cos(x[i]), 1e-4);
}

TEST(Gauges, LandauZeroAndLinearity) {
    std::vector<double> x{0.0, 0.5, 1.0, 1.5, 2.0};
    for (double a : landau_gauge([](double) { return 0.0; }, x)) EXPECT_EQ(a, 0.0);
    auto f = [](double s) { return s * s; };
    auto g = [](double s) { return std::exp(-s); };
    const auto Af = landau_gauge(f, x), Ag = landau_gauge(g, x);
    const auto Afg = landau_gauge([&](double s) { return 2.0 * f(s) - 3.0 * g(s); }, x);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(Afg[i], 2.0 * Af[i] - 3.0 * Ag[i], 1e-12);
}

TEST(Gauges, RotationalConstantField) {
    std::vector<double> r;
    for (int i = 0; i <= 50; ++i) r.push_back(0.1 * i);
    const double b = 1.7;
    const auto A = rotational_gauge([b](double) { return b; }, r);
    for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(A[i], b * r[i] / 2.0, 1e-10);
}

TEST(Gauges, RotationalInverseField) {
    std::vector<double> r{0.01, 0.1, 1.0, 2.0, 5.0};
    const auto A = rotational_gauge([](double s) { return 1.0 / s; }, r);
    for (double a : A) EXPECT_NEAR(a, 1.0, 1e-8);
}

TEST(Gauges, RotationalZeroAndSingular) {
    std::vector<double> r{0.5, 1.0};
    for (double a : rotational_gauge([](double) { return 0.0; }, r)) EXPECT_EQ(a, 0.0);
    EXPECT_THROW(rotational_gauge([](double s) { return 1.0 / (s * s * s); }, r), DomainError);
}

TEST(Gauges, RotationalLinearity) {
    std::vector<double> r{0.2, 0.7, 1.9, 3.3};
    auto f = [](double s) { return std::cos(s); };
    auto g = [](double s) { return s; };
    const auto Af = rotational_gauge(f, r), Ag = rotational_gauge(g, r);
    const auto Afg = rotational_gauge([&](double s) { return f(s) + 4.0 * g(s); }, r);
    for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(Afg[i], Af[i] + 4.0 * Ag[i], 1e-10);
}
