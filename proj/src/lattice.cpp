#include "dirac/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "dirac/linalg.hpp"

namespace dirac {

std::string to_string(Geometry g) { return g == Geometry::Line ? "line" : "half-line"; }

Geometry geometry_from_string(const std::string& s) {
    if (s == "line") return Geometry::Line;
    if (s == "half-line" || s == "halfline") return Geometry::HalfLine;
    throw ConfigError("unknown geometry '" + s + "'");
}

Eigen::Matrix2cd sigma1() {
    Eigen::Matrix2cd s;
    s << 0, 1, 1, 0;
    return s;
}
Eigen::Matrix2cd sigma2() {
    Eigen::Matrix2cd s;
    s << 0, -I, I, 0;
    return s;
}
Eigen::Matrix2cd sigma3() {
    Eigen::Matrix2cd s;
    s << 1, 0, 0, -1;
    return s;
}

double Grid::node(int j) const {
    if (geometry == Geometry::Line) return (j - 0.5 * (n - 1)) * dx;
    return (j + 0.5) * dx;
}

double Grid::site_pos(int m) const {
    const double x = node(m / 2);
    return (m % 2 == 1) ? x + 0.5 * dx : x;
}

double Grid::left_wall() const { return node(0) - 0.5 * dx; }
double Grid::right_wall() const { return node(n - 1) + dx; }

double Grid::edge_distance() const {
    if (geometry == Geometry::HalfLine) return right_wall();
    return std::min(-left_wall(), right_wall());
}

void Grid::validate() const {
    if (!(dx > 0.0)) throw ConfigError("grid spacing must be positive");
    if (n < 1) throw ConfigError("grid needs at least one node");
}

Grid make_line_grid(double half_length, double dx) {
    Grid g;
    g.geometry = Geometry::Line;
    g.dx = dx;
    g.n = static_cast<int>(std::lround(2.0 * half_length / dx));
    g.validate();
    return g;
}

Grid make_halfline_grid(double length, double dx) {
    Grid g;
    g.geometry = Geometry::HalfLine;
    g.dx = dx;
    g.n = static_cast<int>(std::lround(length / dx));
    g.validate();
    return g;
}

cplx chain_phase(int m) {
    switch (m % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

Eigen::MatrixXcd DiracMatrix::dense() const {
    const int N = size();
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(N, N);
    for (int m = 0; m < N; ++m) H(m, m) = diag(m);
    for (int m = 0; m + 1 < N; ++m) {
        H(m, m + 1) += upper(m);
        H(m + 1, m) += std::conj(upper(m));
    }
    if (periodic) {
        H(N - 1, 0) += wrap;
        H(0, N - 1) += std::conj(wrap);
    }
    return H;
}

Eigen::VectorXcd DiracMatrix::apply(const Eigen::VectorXcd& v) const {
    const int N = size();
    Eigen::VectorXcd out(N);
    for (int m = 0; m < N; ++m) {
        cplx s = diag(m) * v(m);
        if (m + 1 < N) s += upper(m) * v(m + 1);
        if (m > 0) s += std::conj(upper(m - 1)) * v(m - 1);
        out(m) = s;
    }
    if (periodic) {
        out(N - 1) += wrap * v(0);
        out(0) += std::conj(wrap) * v(N - 1);
    }
    return out;
}

bool DiracMatrix::real_tridiagonal_form() const {
    if (periodic) return false;
    for (int m = 0; m + 1 < size(); ++m)
        if (upper(m).real() != 0.0) return false;
    return true;
}

void DiracMatrix::write_triplets(std::ostream& os) const {
    // row, col, re, im ; zero-based, one line per stored entry
    os << "# dirac matrix triplets: row,col,re,im; sites=" << size() << ", dx=" << grid.dx
       << ", geometry=" << to_string(grid.geometry) << "\n";
    os << std::setprecision(17);
    for (int m = 0; m < size(); ++m) {
        if (m > 0) os << m << ',' << m - 1 << ',' << std::conj(upper(m - 1)).real() << ','
                      << std::conj(upper(m - 1)).imag() << '\n';
        os << m << ',' << m << ',' << diag(m) << ",0\n";
        if (m + 1 < size())
            os << m << ',' << m + 1 << ',' << upper(m).real() << ',' << upper(m).imag() << '\n';
    }
    if (periodic) {
        const int N = size();
        os << N - 1 << ",0," << wrap.real() << ',' << wrap.imag() << '\n';
        os << "0," << N - 1 << ',' << wrap.real() << ',' << -wrap.imag() << '\n';
    }
}

DiracMatrix assemble_chain(const Grid& grid, const Field& S, const Field& W, const Field& mz) {
    grid.validate();
    const int N = grid.sites();
    DiracMatrix H;
    H.grid = grid;
    H.diag.resize(N);
    H.upper.resize(N > 0 ? N - 1 : 0);
    const double h = 1.0 / grid.dx;
    for (int m = 0; m < N; ++m) {
        const double x = grid.site_pos(m);
        const double sg = (m % 2 == 1) ? 1.0 : -1.0;  // sigma3: +1 on psi1
        H.diag(m) = S(x) + sg * mz(x);
    }
    // sigma2 W couples psi1 -> psi2 with -iW and psi2 -> psi1 with +iW; each
    // bond carries half of it, taken at the bond midpoint.
    for (int m = 0; m + 1 < N; ++m) {
        const double w = W(grid.bond_mid(m));
        if (m % 2 == 1)
            H.upper(m) = cplx(0.0, -h - 0.5 * w);  // psi1 at m, psi2 at m+1
        else
            H.upper(m) = cplx(0.0, -h + 0.5 * w);  // psi2 at m, psi1 at m+1
    }
    return H;
}

DiracMatrix assemble_line(const Grid& grid, const Field& V, const Field& A, double xi, double m) {
    if (grid.geometry != Geometry::Line) throw DomainError("assemble_line needs a line grid");
    auto W = [&](double x) { return xi - A(x); };
    auto mz = [m](double) { return m; };
    DiracMatrix H = assemble_chain(grid, V, W, mz);
    H.xi = xi;
    H.mass = m;
    return H;
}

DiracMatrix assemble_halfline(const Grid& grid, const Field& V, const Field& A, double k, double m,
                              std::optional<double> alpha) {
    if (grid.geometry != Geometry::HalfLine)
        throw DomainError("assemble_halfline needs a half-line grid");
    const double twice = 2.0 * k;
    if (std::abs(twice - std::round(twice)) > 1e-12 ||
        (k != 0.0 && std::abs(std::fmod(std::abs(twice), 2.0) - 1.0) > 1e-12))
        throw ConfigError("channel k must be 0 or a half-odd integer");
    if (alpha && std::abs(k) >= 0.5)
        throw ConfigError("boundary parameter alpha is only meaningful for k = 0");
    auto W = [&](double x) { return k / x - A(x); };
    auto mz = [m](double) { return m; };
    DiracMatrix H = assemble_chain(grid, V, W, mz);
    H.k = k;
    H.mass = m;
    if (k == 0.0) {
        const double a = alpha.value_or(0.0);
        const double c = std::cos(a);
        if (std::abs(c) < 1e-12)
            throw ConfigError("alpha with cos(alpha) = 0 is not representable on the staggered grid");
        // Ghost psi1 at x = 0 eliminated through psi1(0) = -i tan(alpha) psi2(0).
        H.diag(0) += std::tan(a) / grid.dx;
        H.alpha = a;
    }
    return H;
}

DiracMatrix assemble_line(const Grid& grid, const PotentialSpec& spec, double xi, double m) {
    if (spec.geometry != Geometry::Line) throw DomainError("potential is not a line potential");
    return assemble_line(grid, spec.V_field(), spec.A_field(), xi, m);
}

DiracMatrix assemble_halfline(const Grid& grid, const PotentialSpec& spec, double k, double m,
                              std::optional<double> alpha) {
    if (spec.geometry != Geometry::HalfLine)
        throw DomainError("potential is not a half-line potential");
    return assemble_halfline(grid, spec.V_field(), spec.A_field(), k, m, alpha);
}

DiracMatrix assemble_periodic_free(int n, double dx, double m) {
    Grid g;
    g.geometry = Geometry::Line;
    g.n = n;
    g.dx = dx;
    auto zero = [](double) { return 0.0; };
    auto mz = [m](double) { return m; };
    DiracMatrix H = assemble_chain(g, zero, zero, mz);
    H.periodic = true;
    H.wrap = cplx(0.0, -1.0 / dx);  // site N-1 (psi1) -> site 0 (psi2), same stencil
    H.mass = m;
    H.xi = 0.0;
    return H;
}

Eigen::VectorXcd EigenSystem::vector(int k) const {
    if (!phased) return Z.col(k);
    Eigen::VectorXcd v(Q.rows());
    for (int m = 0; m < Q.rows(); ++m) v(m) = chain_phase(m) * Q(m, k);
    return v;
}

Eigen::VectorXcd EigenSystem::coefficients(const Eigen::VectorXcd& psi) const {
    if (!phased) return Z.adjoint() * psi;
    const int N = static_cast<int>(Q.rows());
    Eigen::VectorXd re(N), im(N);
    for (int m = 0; m < N; ++m) {
        const cplx u = std::conj(chain_phase(m)) * psi(m);
        re(m) = u.real();
        im(m) = u.imag();
    }
    Eigen::VectorXd cr = Q.transpose() * re, ci = Q.transpose() * im;
    Eigen::VectorXcd c(cr.size());
    for (int k = 0; k < cr.size(); ++k) c(k) = cplx(cr(k), ci(k));
    return c;
}

Eigen::VectorXcd EigenSystem::synthesize(const Eigen::VectorXcd& c) const {
    if (!phased) return Z * c;
    const Eigen::VectorXd vr = Q * c.real(), vi = Q * c.imag();
    Eigen::VectorXcd v(vr.size());
    for (int m = 0; m < vr.size(); ++m) v(m) = chain_phase(m) * cplx(vr(m), vi(m));
    return v;
}

std::vector<int> EigenSystem::indices_in(const Interval& d) const {
    std::vector<int> idx;
    for (int k = 0; k < count(); ++k)
        if (values(k) >= d.lo && values(k) <= d.hi) idx.push_back(k);
    return idx;
}

double EigenSystem::max_residual(const DiracMatrix& H) const {
    double r = 0.0;
    for (int k = 0; k < count(); ++k) {
        const Eigen::VectorXcd v = vector(k);
        r = std::max(r, (H.apply(v) - values(k) * v).norm());
    }
    return r;
}

namespace {

void real_form(const DiracMatrix& H, Eigen::VectorXd& d, Eigen::VectorXd& e) {
    const int N = H.size();
    d = H.diag;
    e.resize(std::max(N - 1, 0));
    // H(m,m+1) = -i e_m in the rotated basis
    for (int m = 0; m + 1 < N; ++m) e(m) = (I * H.upper(m)).real();
}

}  // namespace

EigenSystem eigensystem(const DiracMatrix& H) {
    EigenSystem es;
    es.grid = H.grid;
    es.complete = true;
    if (H.real_tridiagonal_form()) {
        Eigen::VectorXd d, e;
        real_form(H, d, e);
        TridiagEigen te = symmetric_tridiagonal_eigen(d, e, true);
        es.values = std::move(te.values);
        es.Q = std::move(te.vectors);
        es.phased = true;
        return es;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H.dense());
    if (solver.info() != Eigen::Success) throw NumericError("dense eigensolver failed");
    es.values = solver.eigenvalues();
    es.Z = solver.eigenvectors();
    es.phased = false;
    return es;
}

EigenSystem eigensystem(const DiracMatrix& H, double lo, double hi) {
    if (!(lo < hi)) throw DomainError("empty eigenvalue window");
    if (!H.real_tridiagonal_form()) {
        EigenSystem full = eigensystem(H);
        std::vector<int> idx = full.indices_in({lo, hi});
        EigenSystem es;
        es.grid = H.grid;
        es.phased = false;
        es.complete = false;
        es.values.resize(static_cast<int>(idx.size()));
        es.Z.resize(full.dim(), static_cast<int>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i) {
            es.values(static_cast<int>(i)) = full.values(idx[i]);
            es.Z.col(static_cast<int>(i)) = full.Z.col(idx[i]);
        }
        return es;
    }
    Eigen::VectorXd d, e;
    real_form(H, d, e);
    TridiagEigen te = symmetric_tridiagonal_eigen(d, e, true, lo, hi);
    EigenSystem es;
    es.grid = H.grid;
    es.values = std::move(te.values);
    es.Q = std::move(te.vectors);
    es.phased = true;
    es.complete = es.values.size() == H.size();
    return es;
}

Eigen::MatrixXcd spectral_projector(const EigenSystem& es, const Interval& delta) {
    const int N = es.dim();
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(N, N);
    for (int k : es.indices_in(delta)) {
        const Eigen::VectorXcd v = es.vector(k);
        P.noalias() += v * v.adjoint();
    }
    return P;
}

Eigen::VectorXcd apply_spectral_projector(const EigenSystem& es, const Interval& delta,
                                          const Eigen::VectorXcd& psi) {
    Eigen::VectorXcd c = es.coefficients(psi);
    for (int k = 0; k < es.count(); ++k)
        if (!(es.values(k) >= delta.lo && es.values(k) <= delta.hi)) c(k) = 0.0;
    return es.synthesize(c);
}

}  // namespace dirac
