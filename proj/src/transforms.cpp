#include "dirac/transforms.hpp"

#include <algorithm>
#include <cmath>

#include "dirac/linalg.hpp"

namespace dirac {

namespace {

// node j: site 2j = psi2, site 2j+1 = psi1
inline void block_apply(const Eigen::Matrix2cd& B, cplx& p1, cplx& p2) {
    const cplx a = B(0, 0) * p1 + B(0, 1) * p2;
    const cplx b = B(1, 0) * p1 + B(1, 1) * p2;
    p1 = a;
    p2 = b;
}

double simpson(const Field& f, double a, double b) {
    return (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
}

}  // namespace

Eigen::VectorXcd apply_node_blocks(const NodeBlocks& B, const Eigen::VectorXcd& v) {
    if (static_cast<long>(2 * B.size()) != v.size()) throw DomainError("block count does not match vector");
    Eigen::VectorXcd out = v;
    for (std::size_t j = 0; j < B.size(); ++j) block_apply(B[j], out(2 * j + 1), out(2 * j));
    return out;
}

NodeBlocks adjoint_blocks(const NodeBlocks& B) {
    NodeBlocks A(B.size());
    for (std::size_t j = 0; j < B.size(); ++j) A[j] = B[j].adjoint();
    return A;
}

std::vector<double> cumulative_from_zero(const std::vector<double>& x, const std::vector<double>& V) {
    const std::size_t n = x.size();
    std::vector<double> phi(n, 0.0);
    if (n == 0) return phi;
    std::size_t j0 = 0;
    for (std::size_t j = 1; j < n; ++j)
        if (std::abs(x[j]) < std::abs(x[j0])) j0 = j;
    phi[j0] = V[j0] * x[j0];
    for (std::size_t j = j0 + 1; j < n; ++j) phi[j] = phi[j - 1] + 0.5 * (V[j] + V[j - 1]) * (x[j] - x[j - 1]);
    for (std::size_t j = j0; j-- > 0;) phi[j] = phi[j + 1] - 0.5 * (V[j] + V[j + 1]) * (x[j + 1] - x[j]);
    return phi;
}

NodeBlocks gauge_unitary(const std::vector<double>& V_nodes, const Grid& grid) {
    if (static_cast<int>(V_nodes.size()) != grid.n) throw DomainError("V samples do not match grid");
    std::vector<double> x(grid.n);
    for (int j = 0; j < grid.n; ++j) x[j] = grid.node(j);
    const std::vector<double> phi = cumulative_from_zero(x, V_nodes);
    NodeBlocks U(grid.n);
    for (int j = 0; j < grid.n; ++j) {
        const double c = std::cos(phi[j]), s = std::sin(phi[j]);
        U[j] << c, I * s, I * s, c;
    }
    return U;
}

ChainGauge::ChainGauge(const Grid& grid, const Field& V) {
    const int N = grid.sites();
    phi_.assign(N, 0.0);
    int m0 = 0;
    for (int m = 1; m < N; ++m)
        if (std::abs(grid.site_pos(m)) < std::abs(grid.site_pos(m0))) m0 = m;
    phi_[m0] = simpson(V, 0.0, grid.site_pos(m0));
    for (int m = m0 + 1; m < N; ++m) phi_[m] = phi_[m - 1] + simpson(V, grid.site_pos(m - 1), grid.site_pos(m));
    for (int m = m0; m-- > 0;) phi_[m] = phi_[m + 1] - simpson(V, grid.site_pos(m), grid.site_pos(m + 1));
    Eigen::VectorXd d = Eigen::VectorXd::Zero(N), e(std::max(N - 1, 0));
    for (int m = 0; m + 1 < N; ++m) e(m) = 0.25 * (phi_[m] + phi_[m + 1]);
    TridiagEigen te = symmetric_tridiagonal_eigen(d, e, true);
    lambda_ = std::move(te.values);
    Q_ = std::move(te.vectors);
}

Eigen::VectorXcd ChainGauge::apply(const Eigen::VectorXcd& v, bool inverse) const {
    const double sg = inverse ? -1.0 : 1.0;
    const Eigen::VectorXd cr = Q_.transpose() * v.real(), ci = Q_.transpose() * v.imag();
    Eigen::VectorXd yr(cr.size()), yi(cr.size());
    for (int k = 0; k < cr.size(); ++k) {
        const cplx c = std::exp(cplx(0.0, sg * lambda_(k))) * cplx(cr(k), ci(k));
        yr(k) = c.real();
        yi(k) = c.imag();
    }
    const Eigen::VectorXd outr = Q_ * yr, outi = Q_ * yi;
    Eigen::VectorXcd out(outr.size());
    for (int m = 0; m < outr.size(); ++m) out(m) = cplx(outr(m), outi(m));
    return out;
}

std::vector<int> interior_sites(const Grid& grid, double trim) {
    std::vector<int> idx;
    if (grid.geometry == Geometry::Line) {
        const double lim = (1.0 - trim) * grid.edge_distance();
        for (int m = 0; m < grid.sites(); ++m)
            if (std::abs(grid.site_pos(m)) <= lim) idx.push_back(m);
    } else {
        // only the truncation wall is an artifact; the boundary at 0 is physical
        const double lim = (1.0 - trim) * grid.right_wall();
        for (int m = 0; m < grid.sites(); ++m)
            if (grid.site_pos(m) <= lim) idx.push_back(m);
    }
    return idx;
}

namespace {

Eigen::VectorXcd embed(const std::vector<int>& idx, const Eigen::VectorXcd& small, int N) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(N);
    for (std::size_t i = 0; i < idx.size(); ++i) out(idx[i]) = small(static_cast<long>(i));
    return out;
}

Eigen::VectorXcd extract(const std::vector<int>& idx, const Eigen::VectorXcd& v) {
    Eigen::VectorXcd out(static_cast<long>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<long>(i)) = v(idx[i]);
    return out;
}

}  // namespace

GaugeCovarianceReport gauge_covariance(const Grid& grid, const Field& V, cplx z, double trim,
                                       bool with_node_gauge) {
    GaugeCovarianceReport rep;
    rep.dx = grid.dx;
    rep.trim = trim;
    auto zero = [](double) { return 0.0; };
    const DiracMatrix hv = assemble_line(grid, V, zero), h0 = assemble_line(grid, zero, zero);
    const TridiagSolver Rv(hv, z), R0(h0, z);
    const std::vector<int> idx = interior_sites(grid, trim);
    const int N = grid.sites();
    const int n = static_cast<int>(idx.size());

    const ChainGauge U(grid, V);
    auto fwd = [&](const Eigen::VectorXcd& s) {
        const Eigen::VectorXcd x = embed(idx, s, N);
        return extract(idx, U.apply(Rv.solve(U.apply(x, true))) - R0.solve(x));
    };
    auto adj = [&](const Eigen::VectorXcd& s) {
        const Eigen::VectorXcd x = embed(idx, s, N);
        return extract(idx, U.apply(Rv.solve(U.apply(x, true), true)) - R0.solve(x, true));
    };
    rep.chain_error = operator_norm(fwd, adj, n);

    if (with_node_gauge) {
        std::vector<double> vn(grid.n);
        for (int j = 0; j < grid.n; ++j) vn[j] = V(grid.node(j));
        const NodeBlocks Un = gauge_unitary(vn, grid), Und = adjoint_blocks(Un);
        auto fwdn = [&](const Eigen::VectorXcd& s) {
            const Eigen::VectorXcd x = embed(idx, s, N);
            return extract(idx, apply_node_blocks(Un, Rv.solve(apply_node_blocks(Und, x))) - R0.solve(x));
        };
        auto adjn = [&](const Eigen::VectorXcd& s) {
            const Eigen::VectorXcd x = embed(idx, s, N);
            return extract(idx, apply_node_blocks(Un, Rv.solve(apply_node_blocks(Und, x), true)) -
                                    R0.solve(x, true));
        };
        rep.node_error = operator_norm(fwdn, adjn, n);
    }
    return rep;
}

BoostData boost_fields(const PotentialSpec& spec, const Grid& grid, Hypothesis direction) {
    if (spec.geometry != grid.geometry) throw DomainError("potential and grid geometry differ");
    const Hypothesis dir = direction == Hypothesis::H1Prime ? Hypothesis::H1Prime : Hypothesis::H1;
    BoostData bd;
    bd.direction = direction;
    const Eigen::Matrix2cd s2 = sigma2(), id = Eigen::Matrix2cd::Identity();
    for (int j = 0; j < grid.n; ++j) {
        const double x = grid.node(j) + 0.25 * grid.dx;
        const double b = boost_beta(spec, dir, x);
        if (!(std::abs(b) < 1.0))
            throw DomainError("boost refused: |beta| >= 1 at x = " + std::to_string(x) +
                              " violates condition ii)");
        const double th = std::atanh(b);
        const double g = std::cosh(th);
        bd.x.push_back(x);
        bd.beta.push_back(b);
        bd.theta.push_back(th);
        bd.gamma.push_back(g);
        bd.theta_prime.push_back(boost_beta_derivative(spec, dir, x) / (1.0 - b * b));
        bd.M.push_back(g * (id - b * s2));
        bd.Minv.push_back(g * (id + b * s2));
        bd.expF.push_back(std::cosh(0.5 * th) * id + std::sinh(0.5 * th) * s2);
        bd.expmF.push_back(std::cosh(0.5 * th) * id - std::sinh(0.5 * th) * s2);
        bd.F.push_back(0.5 * th * s2);
        bd.theta_max = std::max(bd.theta_max, std::abs(th));
    }
    return bd;
}

namespace {

Field w_field(const PotentialSpec& spec, const Grid& grid, const OperatorInputs& op) {
    if (grid.geometry == Geometry::Line) {
        const double xi = op.xi;
        return [spec, xi](double x) { return xi - spec.A(x); };
    }
    const double k = op.k;
    return [spec, k](double x) { return k / x - spec.A(x); };
}

}  // namespace

DiracMatrix assemble_plain(const PotentialSpec& spec, const Grid& grid, const OperatorInputs& op) {
    if (grid.geometry == Geometry::Line) return assemble_line(grid, spec, op.xi, op.mass);
    return assemble_halfline(grid, spec, op.k, op.mass);
}

DiracMatrix assemble_boosted(const PotentialSpec& spec, const Grid& grid, const OperatorInputs& op,
                             Hypothesis direction) {
    if (spec.geometry != grid.geometry) throw DomainError("potential and grid geometry differ");
    if (grid.geometry == Geometry::HalfLine && op.k == 0.0)
        throw DomainError("boosted half-line operator needs a channel |k| >= 1/2");
    const Hypothesis dir = direction == Hypothesis::H1Prime ? Hypothesis::H1Prime : Hypothesis::H1;
    const Field W = w_field(spec, grid, op);
    auto beta = [&](double x) { return boost_beta(spec, dir, x); };
    auto gam = [&](double x) {
        const double b = beta(x);
        return 1.0 / std::sqrt(1.0 - b * b);
    };
    auto S = [&](double x) { return gam(x) * (spec.V(x) + beta(x) * W(x)); };
    auto Wt = [&](double x) { return gam(x) * (W(x) + beta(x) * spec.V(x)); };
    const double m = op.mass;
    auto mz = [&](double x) {
        const double b = beta(x);
        return m + 0.5 * boost_beta_derivative(spec, dir, x) / (1.0 - b * b);
    };
    DiracMatrix H = assemble_chain(grid, S, Wt, mz);
    H.mass = op.mass;
    if (grid.geometry == Geometry::Line) H.xi = op.xi;
    else H.k = op.k;
    return H;
}

BandMatrix boosted_shifted(const DiracMatrix& ht, const BoostData& bd, cplx z) {
    const int N = ht.size();
    if (static_cast<int>(bd.M.size()) * 2 != N) throw DomainError("boost data does not match operator");
    BandMatrix A(N, 2, 2);
    auto hent = [&](int i, int j) -> cplx {
        if (i == j) return ht.diag(i);
        if (j == i + 1) return ht.upper(i);
        if (i == j + 1) return std::conj(ht.upper(j));
        return 0.0;
    };
    for (int j = 0; j < N / 2; ++j) {
        const Eigen::Matrix2cd& Mb = bd.M[j];
        const int r1 = 2 * j + 1, r2 = 2 * j;  // psi1 and psi2 rows of node j
        for (int c = std::max(0, r2 - 1); c <= std::min(N - 1, r1 + 1); ++c) {
            const cplx h1 = hent(r1, c), h2 = hent(r2, c);
            A.add(r1, c, Mb(0, 0) * h1 + Mb(0, 1) * h2);
            A.add(r2, c, Mb(1, 0) * h1 + Mb(1, 1) * h2);
        }
    }
    for (int i = 0; i < N; ++i) A.add(i, i, -z);
    return A;
}

ResolventIdentityReport verify_resolvent_identity(const DiracMatrix& h, const DiracMatrix& ht,
                                                  const BoostData& bd, cplx z, double trim) {
    if (z.imag() == 0.0) throw DomainError("z must lie off the real axis");
    ResolventIdentityReport rep;
    rep.dx = h.grid.dx;
    rep.trim = trim;
    const int N = h.size();
    BandMatrix B = boosted_shifted(ht, bd, z);
    B.factor();
    const TridiagSolver R(h, z);
    const NodeBlocks& Ep = bd.expF;
    const NodeBlocks& Em = bd.expmF;
    const NodeBlocks EpD = adjoint_blocks(Ep), EmD = adjoint_blocks(Em);

    const std::vector<int> idx = interior_sites(h.grid, trim);
    const int n = static_cast<int>(idx.size());
    auto fwd = [&](const Eigen::VectorXcd& s) {
        const Eigen::VectorXcd x = embed(idx, s, N);
        return extract(idx, B.solve(x) - apply_node_blocks(Em, R.solve(apply_node_blocks(Ep, x))));
    };
    auto adj = [&](const Eigen::VectorXcd& s) {
        const Eigen::VectorXcd x = embed(idx, s, N);
        return extract(idx, B.solve(x, true) -
                                apply_node_blocks(EpD, R.solve(apply_node_blocks(EmD, x), true)));
    };
    rep.r1 = operator_norm(fwd, adj, n);

    auto bf = [&](const Eigen::VectorXcd& x) { return B.solve(x); };
    auto ba = [&](const Eigen::VectorXcd& x) { return B.solve(x, true); };
    rep.norm_boosted = operator_norm(bf, ba, N);
    auto hf = [&](const Eigen::VectorXcd& x) { return R.solve(x); };
    auto ha = [&](const Eigen::VectorXcd& x) { return R.solve(x, true); };
    rep.norm_plain = operator_norm(hf, ha, N);
    rep.bound = rep.norm_plain * std::exp(bd.theta_max);
    rep.bound_ok = rep.norm_boosted <= rep.bound;
    return rep;
}

double lorentz_free_defect(const BoostData& bd, const Grid& grid, const PotentialSpec& spec,
                           const Eigen::VectorXcd& phi) {
    const Hypothesis dir = bd.direction == Hypothesis::H1Prime ? Hypothesis::H1Prime : Hypothesis::H1;
    auto zero = [](double) { return 0.0; };
    const DiracMatrix K = assemble_chain(grid, zero, zero, zero);
    const Eigen::VectorXcd lhs = apply_node_blocks(bd.expmF, K.apply(apply_node_blocks(bd.expF, phi)));
    Eigen::VectorXcd inner = K.apply(phi);
    for (int m = 0; m < grid.sites(); ++m) {
        const double x = grid.site_pos(m);
        const double b = boost_beta(spec, dir, x);
        const double tp = boost_beta_derivative(spec, dir, x) / (1.0 - b * b);
        const double sg = (m % 2 == 1) ? 1.0 : -1.0;
        inner(m) += sg * 0.5 * tp * phi(m);
    }
    const Eigen::VectorXcd rhs = apply_node_blocks(bd.M, inner);
    return (lhs - rhs).norm() / phi.norm();
}

}  // namespace dirac
