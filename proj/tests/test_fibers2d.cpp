#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dirac/fibers2d.hpp"

using namespace dirac;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const Field zero = [](double) { return 0.0; };

TranslationField separable(const Grid& g, int n2, double dx2, Eigen::VectorXcd& f, Eigen::VectorXcd& h) {
    TranslationField t;
    t.grid = g;
    t.n2 = n2;
    t.dx2 = dx2;
    f.resize(g.sites());
    for (int m = 0; m < g.sites(); ++m) {
        const double x = g.site_pos(m);
        f(m) = std::exp(-x * x) * (m % 2 ? cplx(1.0, 0.2) : cplx(0.3, -0.5));
    }
    h.resize(n2);
    for (int j = 0; j < n2; ++j) {
        const double y = t.x2(j);
        h(j) = std::exp(-0.5 * y * y) * std::exp(cplx(0.0, 0.7 * y)) + 0.1 * std::cos(3.0 * y);
    }
    t.values = f * h.transpose();
    return t;
}

PolarField polar(const Grid& g, int Q) {
    PolarField p;
    p.grid = g;
    p.Q = Q;
    p.upper = Eigen::MatrixXcd::Zero(g.n, Q);
    p.lower = Eigen::MatrixXcd::Zero(g.n, Q);
    return p;
}

}  // namespace

TEST(Fibers, SeparableTranslationFiber) {
    const Grid g = make_line_grid(4.0, 0.1);
    const int n2 = 8;
    const double dx2 = 0.9;
    Eigen::VectorXcd f, h;
    const TranslationField t = separable(g, n2, dx2, f, h);
    const FiberFamily fam = fiber_translation(t);
    ASSERT_EQ(fam.size(), n2);
    const double L2 = n2 * dx2;
    for (int q = 0; q < n2; ++q) {
        // direct unitary Fourier sum over the periodic x2 grid
        cplx hat = 0.0;
        for (int j = 0; j < n2; ++j) hat += dx2 * std::exp(cplx(0.0, -fam.labels[q] * t.x2(j))) * h(j);
        hat /= std::sqrt(L2);
        EXPECT_LE((fam.states[q].amplitudes - hat * f).norm(), 1e-12 * f.norm());
        if (q) EXPECT_GT(fam.labels[q], fam.labels[q - 1]);
    }
}

TEST(Fibers, DualGridLabels) {
    const std::vector<double> xi = dual_grid(5, kTwoPi);
    ASSERT_EQ(xi.size(), 5u);
    const std::vector<double> expect{-0.4, -0.2, 0.0, 0.2, 0.4};
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(xi[i], expect[i], 1e-14);
}

TEST(Fibers, TranslationParsevalAndRoundTrip) {
    const Grid g = make_line_grid(4.0, 0.1);
    TranslationField t;
    t.grid = g;
    t.n2 = 6;
    t.dx2 = 0.5;
    t.values = Eigen::MatrixXcd::Random(g.sites(), t.n2);
    const FiberFamily fam = fiber_translation(t);
    EXPECT_NEAR(fam.weight_sum(), t.norm_squared(), 1e-10 * t.norm_squared());
    const TranslationField back = inverse_translation(fam);
    EXPECT_LE((back.values - t.values).norm(), 1e-10 * t.values.norm());
}

TEST(Fibers, ProjectorActsFiberwise) {
    const Grid g = make_line_grid(3.0, 0.1);
    auto V = [](double x) { return 0.6 * x; };
    auto A = [](double x) { return 0.3 * x; };
    const int n2 = 4;
    const double dx2 = 1.3;
    Eigen::VectorXcd f, h;
    TranslationField t = separable(g, n2, dx2, f, h);
    t.values += 0.3 * Eigen::MatrixXcd::Random(g.sites(), n2);
    const Interval delta{-1.03, 0.97};
    const TranslationField filtered = filter_translation_2d(assemble_translation_2d(g, V, A, n2, dx2), delta, t);
    const FiberFamily a = fiber_translation(filtered);
    const FiberFamily b = fiber_translation(t);
    for (int q = 0; q < n2; ++q) {
        const EigenSystem es = eigensystem(assemble_line(g, V, A, b.labels[q]));
        const Eigen::VectorXcd pb = apply_spectral_projector(es, delta, b.states[q].amplitudes);
        EXPECT_LE((a.states[q].amplitudes - pb).norm(), 1e-8 * (1.0 + pb.norm())) << q;
    }
}

TEST(Fibers, TwoDimensionalMomentIsFiberSum) {
    const Grid g = make_line_grid(3.0, 0.1);
    auto V = [](double x) { return 0.5 * x; };
    const int n2 = 4;
    const double dx2 = 1.1;
    Eigen::VectorXcd f, h;
    const TranslationField t = separable(g, n2, dx2, f, h);
    const Eigen::MatrixXcd H2 = assemble_translation_2d(g, V, zero, n2, dx2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es2(H2);
    Eigen::VectorXcd v(g.sites() * n2);
    for (int m = 0; m < g.sites(); ++m)
        for (int j = 0; j < n2; ++j) v(m * n2 + j) = t.values(m, j);
    const FiberFamily fam = fiber_translation(t);
    std::vector<EigenSystem> fes;
    for (int q = 0; q < n2; ++q) fes.push_back(eigensystem(assemble_line(g, V, zero, fam.labels[q])));
    for (double time : {0.0, 0.4, 1.1}) {
        const Eigen::VectorXcd ph = (-I * time * es2.eigenvalues().array()).exp().matrix();
        const Eigen::VectorXcd w = es2.eigenvectors() * ph.asDiagonal() * es2.eigenvectors().adjoint() * v;
        TranslationField tt = t;
        for (int m = 0; m < g.sites(); ++m)
            for (int j = 0; j < n2; ++j) tt.values(m, j) = w(m * n2 + j);
        double fiber_sum = 0.0;
        for (int q = 0; q < n2; ++q) fiber_sum += moment(evolve(fes[q], fam.states[q], time), 2.0);
        EXPECT_NEAR(translation_moment_2d(tt, 2.0), fiber_sum, 1e-9 * fiber_sum) << time;
    }
}

TEST(Fibers, SingleHarmonicHitsOneChannel) {
    const Grid g = make_halfline_grid(5.0, 0.1);
    const int Q = 16;
    const double k = 1.5;
    PolarField p = polar(g, Q);
    for (int j = 0; j < g.n; ++j)
        for (int q = 0; q < Q; ++q) {
            const double ru = g.site_pos(2 * j + 1), rl = g.site_pos(2 * j), phi = p.angle(q);
            p.upper(j, q) = ru * std::exp(-ru * ru) * std::exp(cplx(0.0, (k - 0.5) * phi));
            p.lower(j, q) = cplx(0.0, 0.5) * rl * rl * std::exp(-rl) * std::exp(cplx(0.0, (k + 0.5) * phi));
        }
    const std::vector<double> ks{-2.5, -1.5, -0.5, 0.5, 1.5, 2.5};
    const FiberFamily fam = fiber_rotation(p, ks);
    for (int i = 0; i < fam.size(); ++i) {
        if (fam.labels[i] == k)
            EXPECT_NEAR(fam.weights[i], p.norm_squared(), 1e-10 * p.norm_squared());
        else
            EXPECT_LE(fam.weights[i], 1e-20);
    }
}

TEST(Fibers, RadialUpperProfileLandsInLowestChannel) {
    const Grid g = make_halfline_grid(5.0, 0.1);
    PolarField p = polar(g, 12);
    for (int j = 0; j < g.n; ++j) p.upper.row(j).setConstant(std::exp(-g.site_pos(2 * j + 1)));
    const FiberFamily fam = fiber_rotation(p, {-1.5, -0.5, 0.5, 1.5});
    EXPECT_NEAR(fam.weights[2], p.norm_squared(), 1e-10 * p.norm_squared());
    EXPECT_LE(fam.weights[0] + fam.weights[1] + fam.weights[3], 1e-20);
}

TEST(Fibers, RotationConservationAndRoundTrip) {
    const Grid g = make_halfline_grid(4.0, 0.1);
    const int Q = 16;
    const std::vector<double> ks{-2.5, -1.5, -0.5, 0.5, 1.5, 2.5};
    FiberFamily fam;
    fam.kind = FiberKind::Rotation;
    fam.Q = Q;
    for (double k : ks) {
        Envelope e;
        e.center = 1.5 + 0.2 * k;
        e.u1 = 1.0;
        e.u2 = cplx(0.2, k);
        fam.labels.push_back(k);
        fam.states.push_back(make_packet(g, e, false));
    }
    const PolarField p = inverse_rotation(fam);
    const FiberFamily back = fiber_rotation(p, ks);
    EXPECT_NEAR(back.weight_sum(), back.total, 1e-6 * back.total);
    for (int i = 0; i < fam.size(); ++i)
        EXPECT_LE((back.states[i].amplitudes - fam.states[i].amplitudes).norm(),
                  1e-10 * fam.states[i].amplitudes.norm());
    EXPECT_THROW(fiber_rotation(p, {7.5}), DomainError);
    EXPECT_THROW(fiber_rotation(p, {1.0}), DomainError);
}

namespace {

BallisticReport synthetic(double p, double c, double e, const std::vector<double>& Ts) {
    std::vector<double> v;
    for (double T : Ts) v.push_back(c * std::pow(T, e));
    return fit_ballistic_values(p, Ts, v, 1e9);
}

FiberFamily weights_only(std::vector<double> w) {
    FiberFamily f;
    f.kind = FiberKind::Rotation;
    for (std::size_t i = 0; i < w.size(); ++i) f.labels.push_back(0.5 + i);
    f.weights = w;
    f.states.resize(w.size());
    f.total = 0.0;
    for (double x : w) f.total += x;
    return f;
}

}  // namespace

TEST(Aggregate, SingleChannelEqualsChannelBound) {
    const std::vector<double> Ts = log_grid(1.0, 20.0, 6);
    const FiberFamily f = weights_only({1.0});
    const BallisticReport r = synthetic(2.0, 0.7, 1.95, Ts);
    const AggregateReport a = aggregate_lower_bound(f, {r}, 2.0, select_labels(f));
    for (std::size_t t = 0; t < Ts.size(); ++t) EXPECT_DOUBLE_EQ(a.bound_values[t], r.cesaro_values[t]);
    EXPECT_NEAR(a.fitted_exponent, 1.95, 1e-12);
    EXPECT_NEAR(a.constant, 0.7, 1e-12);
}

TEST(Aggregate, TwoEqualChannelsDoubleConstant) {
    const std::vector<double> Ts = log_grid(1.0, 20.0, 6);
    const FiberFamily f = weights_only({0.5, 0.5});
    const BallisticReport r = synthetic(1.0, 0.4, 1.0, Ts);
    const AggregateReport a = aggregate_lower_bound(f, {r, r}, 1.0, {0, 1});
    EXPECT_NEAR(a.constant, 0.8, 1e-12);
    EXPECT_NEAR(a.fitted_exponent, 1.0, 1e-12);
    EXPECT_TRUE(a.dominates);
}

TEST(Aggregate, HalfWeightCutEnforced) {
    const std::vector<double> Ts = log_grid(1.0, 20.0, 6);
    const FiberFamily f = weights_only({0.2, 0.5, 0.3});
    const BallisticReport r = synthetic(1.0, 1.0, 1.0, Ts);
    const std::vector<std::optional<BallisticReport>> reps{r, r, r};
    EXPECT_THROW(aggregate_lower_bound(f, reps, 1.0, {0}), DomainError);
    EXPECT_THROW(aggregate_lower_bound(f, reps, 1.0, {2}), DomainError);
    EXPECT_NO_THROW(aggregate_lower_bound(f, reps, 1.0, {0, 2}));  // exactly half
    EXPECT_NO_THROW(aggregate_lower_bound(f, reps, 1.0, {1}));
    const std::vector<int> sel = select_labels(f);
    ASSERT_EQ(sel.size(), 1u);
    EXPECT_EQ(sel[0], 1);
}

TEST(Aggregate, MomentDominatesSelectedBound) {
    const std::vector<double> Ts = log_grid(1.0, 20.0, 6);
    const FiberFamily f = weights_only({0.6, 0.25, 0.15});
    const std::vector<std::optional<BallisticReport>> reps{synthetic(2.0, 1.0, 1.9, Ts), synthetic(2.0, 0.5, 2.1, Ts),
                                                           synthetic(2.0, 0.2, 2.0, Ts)};
    const AggregateReport a = aggregate_lower_bound(f, reps, 2.0, select_labels(f));
    EXPECT_TRUE(a.dominates);
    EXPECT_NEAR(a.min_fiber_exponent, 1.9, 1e-12);
    EXPECT_GE(a.fitted_exponent, a.min_fiber_exponent - 1e-12);
}
