#include "dirac/fibers2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/KroneckerProduct>

#include "dirac/linalg.hpp"

namespace dirac {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// DFT index -> signed frequency index
int signed_index(int q, int n) { return q <= (n - 1) / 2 ? q : q - n; }

std::vector<int> ascending_indices(int n) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [n](int a, int b) { return signed_index(a, n) < signed_index(b, n); });
    return idx;
}

int mod(int a, int n) { return ((a % n) + n) % n; }

void check_half_integer(double k) {
    const double t = 2.0 * k;
    if (std::abs(t - std::round(t)) > 1e-12 || std::abs(std::fmod(std::abs(t), 2.0) - 1.0) > 1e-12)
        throw DomainError("rotation channels must be half-odd integers");
}

}  // namespace

std::string to_string(FiberKind k) { return k == FiberKind::Translation ? "translation" : "rotation"; }

double TranslationField::norm_squared() const { return grid.dx * dx2 * values.squaredNorm(); }

double PolarField::angle(int q) const { return kTwoPi * q / Q; }

double PolarField::norm_squared() const {
    double s = 0.0;
    for (int j = 0; j < grid.n; ++j)
        s += grid.site_pos(2 * j + 1) * upper.row(j).squaredNorm() + grid.site_pos(2 * j) * lower.row(j).squaredNorm();
    return grid.dx * (kTwoPi / Q) * s;
}

double FiberFamily::weight_sum() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

std::vector<double> dual_grid(int n2, double dx2) {
    std::vector<double> xi;
    for (int q : ascending_indices(n2)) xi.push_back(kTwoPi * signed_index(q, n2) / (n2 * dx2));
    return xi;
}

FiberFamily fiber_translation(const TranslationField& f) {
    if (f.n2 < 1 || !(f.dx2 > 0.0) || f.values.rows() != f.grid.sites() || f.values.cols() != f.n2)
        throw DomainError("translation field shape does not match its grid");
    const int N = f.grid.sites(), n2 = f.n2;
    Eigen::FFT<double> fft;
    Eigen::MatrixXcd hat(N, n2);
    std::vector<cplx> in(n2), out;
    for (int m = 0; m < N; ++m) {
        for (int j = 0; j < n2; ++j) in[j] = f.values(m, j);
        fft.fwd(out, in);
        for (int q = 0; q < n2; ++q) hat(m, q) = out[q];
    }
    FiberFamily fam;
    fam.kind = FiberKind::Translation;
    fam.n2 = n2;
    fam.dx2 = f.dx2;
    fam.total = f.norm_squared();
    const double scale = f.dx2 / std::sqrt(f.period());
    for (int q : ascending_indices(n2)) {
        const double xi = kTwoPi * signed_index(q, n2) / f.period();
        const cplx ph = scale * std::exp(cplx(0.0, -xi * f.x2(0)));
        WavePacket w(f.grid, ph * hat.col(q));
        fam.labels.push_back(xi);
        fam.weights.push_back(w.norm_squared());
        fam.states.push_back(std::move(w));
    }
    return fam;
}

TranslationField inverse_translation(const FiberFamily& fam) {
    if (fam.kind != FiberKind::Translation || fam.size() != fam.n2 || fam.n2 < 1)
        throw DomainError("not a complete translation family");
    TranslationField f;
    f.grid = fam.states.front().grid;
    f.n2 = fam.n2;
    f.dx2 = fam.dx2;
    const int N = f.grid.sites();
    f.values = Eigen::MatrixXcd::Zero(N, f.n2);
    const double s = 1.0 / std::sqrt(f.period());
    for (int i = 0; i < fam.size(); ++i)
        for (int j = 0; j < f.n2; ++j)
            f.values.col(j) += s * std::exp(cplx(0.0, fam.labels[i] * f.x2(j))) * fam.states[i].amplitudes;
    return f;
}

FiberFamily fiber_rotation(const PolarField& f, const std::vector<double>& channels) {
    const Grid& g = f.grid;
    if (g.geometry != Geometry::HalfLine) throw DomainError("polar fields live on a half-line grid");
    if (f.Q < 1 || f.upper.rows() != g.n || f.lower.rows() != g.n || f.upper.cols() != f.Q ||
        f.lower.cols() != f.Q)
        throw DomainError("polar field shape does not match its grid");
    double mmax = 0.0;
    for (double k : channels) {
        check_half_integer(k);
        mmax = std::max(mmax, std::abs(k) + 0.5);
    }
    if (f.Q < 2 * mmax + 1) throw DomainError("too few angles to resolve the requested channels");
    Eigen::FFT<double> fft;
    Eigen::MatrixXcd up(g.n, f.Q), lo(g.n, f.Q);
    std::vector<cplx> in(f.Q), out;
    for (int j = 0; j < g.n; ++j) {
        for (int q = 0; q < f.Q; ++q) in[q] = f.upper(j, q);
        fft.fwd(out, in);
        for (int q = 0; q < f.Q; ++q) up(j, q) = out[q] / static_cast<double>(f.Q);
        for (int q = 0; q < f.Q; ++q) in[q] = f.lower(j, q);
        fft.fwd(out, in);
        for (int q = 0; q < f.Q; ++q) lo(j, q) = out[q] / static_cast<double>(f.Q);
    }
    FiberFamily fam;
    fam.kind = FiberKind::Rotation;
    fam.Q = f.Q;
    fam.total = f.norm_squared();
    for (double k : channels) {
        const int mu = mod(static_cast<int>(std::lround(k - 0.5)), f.Q);
        const int ml = mod(static_cast<int>(std::lround(k + 0.5)), f.Q);
        Eigen::VectorXcd a(g.sites());
        for (int j = 0; j < g.n; ++j) {
            a(2 * j + 1) = std::sqrt(kTwoPi * g.site_pos(2 * j + 1)) * up(j, mu);
            a(2 * j) = std::sqrt(kTwoPi * g.site_pos(2 * j)) * lo(j, ml);
        }
        WavePacket w(g, a);
        fam.labels.push_back(k);
        fam.weights.push_back(w.norm_squared());
        fam.states.push_back(std::move(w));
    }
    return fam;
}

PolarField inverse_rotation(const FiberFamily& fam) {
    if (fam.kind != FiberKind::Rotation || fam.states.empty() || fam.Q < 1)
        throw DomainError("not a rotation family");
    PolarField f;
    f.grid = fam.states.front().grid;
    f.Q = fam.Q;
    const Grid& g = f.grid;
    f.upper = Eigen::MatrixXcd::Zero(g.n, f.Q);
    f.lower = Eigen::MatrixXcd::Zero(g.n, f.Q);
    for (int i = 0; i < fam.size(); ++i) {
        const double k = fam.labels[i];
        const Eigen::VectorXcd& a = fam.states[i].amplitudes;
        for (int q = 0; q < f.Q; ++q) {
            const double phi = f.angle(q);
            const cplx eu = std::exp(cplx(0.0, (k - 0.5) * phi)), el = std::exp(cplx(0.0, (k + 0.5) * phi));
            for (int j = 0; j < g.n; ++j) {
                f.upper(j, q) += eu * a(2 * j + 1) / std::sqrt(kTwoPi * g.site_pos(2 * j + 1));
                f.lower(j, q) += el * a(2 * j) / std::sqrt(kTwoPi * g.site_pos(2 * j));
            }
        }
    }
    return f;
}

Eigen::MatrixXcd assemble_translation_2d(const Grid& grid, const Field& V, const Field& A, int n2,
                                         double dx2, double m) {
    if (n2 < 1 || !(dx2 > 0.0)) throw DomainError("bad x2 grid");
    auto zero = [](double) { return 0.0; };
    const Eigen::MatrixXcd H0 = assemble_line(grid, V, A, 0.0, m).dense();
    // bond operator carrying sigma2 xi: h(xi) = h(0) + xi B
    const Eigen::MatrixXcd B = assemble_line(grid, zero, zero, 1.0).dense() - assemble_line(grid, zero, zero, 0.0).dense();
    // -i d/dx2 on the periodic grid, diagonal in the unitary DFT basis
    Eigen::MatrixXcd F(n2, n2);
    for (int q = 0; q < n2; ++q)
        for (int j = 0; j < n2; ++j)
            F(q, j) = std::exp(cplx(0.0, -kTwoPi * q * j / n2)) / std::sqrt(static_cast<double>(n2));
    Eigen::VectorXcd xi(n2);
    for (int q = 0; q < n2; ++q) xi(q) = kTwoPi * signed_index(q, n2) / (n2 * dx2);
    const Eigen::MatrixXcd P = F.adjoint() * xi.asDiagonal() * F;
    const Eigen::MatrixXcd Id = Eigen::MatrixXcd::Identity(n2, n2);
    return Eigen::kroneckerProduct(H0, Id).eval() + Eigen::kroneckerProduct(B, P).eval();
}

TranslationField filter_translation_2d(const Eigen::MatrixXcd& H2d, const Interval& delta,
                                       const TranslationField& f) {
    const int N = f.grid.sites(), n2 = f.n2;
    if (H2d.rows() != N * n2) throw DomainError("2D operator does not match the field");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H2d);
    if (es.info() != Eigen::Success) throw NumericError("dense eigensolver failed");
    Eigen::VectorXcd v(N * n2);
    for (int m = 0; m < N; ++m)
        for (int j = 0; j < n2; ++j) v(m * n2 + j) = f.values(m, j);
    Eigen::VectorXcd c = es.eigenvectors().adjoint() * v;
    for (int k = 0; k < c.size(); ++k) {
        const double e = es.eigenvalues()(k);
        if (e < delta.lo || e > delta.hi) c(k) = 0.0;
    }
    const Eigen::VectorXcd w = es.eigenvectors() * c;
    TranslationField out = f;
    for (int m = 0; m < N; ++m)
        for (int j = 0; j < n2; ++j) out.values(m, j) = w(m * n2 + j);
    return out;
}

double translation_moment_2d(const TranslationField& f, double p) {
    double s = 0.0;
    for (int m = 0; m < f.grid.sites(); ++m)
        s += std::pow(std::abs(f.grid.site_pos(m)), p) * f.values.row(m).squaredNorm();
    return f.grid.dx * f.dx2 * s;
}

std::vector<int> select_labels(const FiberFamily& fam, double fraction) {
    std::vector<int> idx(fam.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return fam.weights[a] > fam.weights[b]; });
    std::vector<int> sel;
    double w = 0.0;
    for (int i : idx) {
        if (w >= fraction * fam.total) break;
        sel.push_back(i);
        w += fam.weights[i];
    }
    std::sort(sel.begin(), sel.end());
    return sel;
}

AggregateReport aggregate_lower_bound(const FiberFamily& fam,
                                      const std::vector<std::optional<BallisticReport>>& reports,
                                      double p, const std::vector<int>& selected) {
    if (static_cast<int>(reports.size()) != fam.size()) throw DomainError("one report slot per label expected");
    AggregateReport r;
    r.p = p;
    r.selected = selected;
    r.total_weight = fam.total;
    for (int i : selected) {
        if (i < 0 || i >= fam.size()) throw DomainError("selected label out of range");
        if (!reports[i]) throw DomainError("selected label has no report");
        r.selected_weight += fam.weights[i];
    }
    // finite label cut: the selected fibers must carry at least half the norm
    if (r.selected_weight < 0.5 * fam.total)
        throw DomainError("selected labels carry " + std::to_string(r.selected_weight / fam.total) +
                          " of the weight; the label cut needs at least one half");
    const std::vector<double>* Ts = nullptr;
    for (int i = 0; i < fam.size(); ++i) {
        if (!reports[i]) {
            if (fam.weights[i] > 1e-12 * fam.total)
                throw DomainError("label with non-negligible weight has no report");
            continue;
        }
        if (reports[i]->p != p) throw DomainError("report moment order differs");
        if (!Ts)
            Ts = &reports[i]->T_values;
        else if (*Ts != reports[i]->T_values)
            throw DomainError("fiber reports use different T grids");
    }
    if (!Ts) throw DomainError("no reports");
    r.T_values = *Ts;
    r.bound_values.assign(Ts->size(), 0.0);
    r.moment_values.assign(Ts->size(), 0.0);
    r.min_fiber_exponent = std::numeric_limits<double>::infinity();
    for (int i = 0; i < fam.size(); ++i) {
        if (!reports[i]) continue;
        const bool sel = std::find(selected.begin(), selected.end(), i) != selected.end();
        for (std::size_t t = 0; t < Ts->size(); ++t) {
            r.moment_values[t] += reports[i]->cesaro_values[t];
            if (sel) r.bound_values[t] += reports[i]->cesaro_values[t];
        }
        if (sel) {
            r.constant += reports[i]->fitted_constant;
            r.min_fiber_exponent = std::min(r.min_fiber_exponent, reports[i]->fitted_exponent);
        }
    }
    for (std::size_t t = 0; t < Ts->size(); ++t)
        r.dominates = r.dominates && r.moment_values[t] >= r.bound_values[t];
    r.fitted_exponent = fit_power_law(r.T_values, r.moment_values).exponent;
    r.bound_exponent = fit_power_law(r.T_values, r.bound_values).exponent;
    return r;
}

}  // namespace dirac
