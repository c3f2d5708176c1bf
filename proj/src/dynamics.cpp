#include "dirac/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dirac/linalg.hpp"
#include "dirac/spectral.hpp"

namespace dirac {

double l2_norm(const Grid& g, const Eigen::VectorXcd& a) { return std::sqrt(g.dx * a.squaredNorm()); }

WavePacket::WavePacket(const Grid& g, Eigen::VectorXcd a) : grid(g), amplitudes(std::move(a)) {
    if (amplitudes.size() != grid.sites()) throw DomainError("packet size does not match grid");
    norm = l2_norm(grid, amplitudes);
}

double WavePacket::recompute_norm() const { return l2_norm(grid, amplitudes); }

WavePacket make_packet(const Grid& g, const Envelope& env, bool normalize) {
    Eigen::VectorXcd a(g.sites());
    for (int m = 0; m < g.sites(); ++m) {
        const double x = g.site_pos(m);
        const double u = (x - env.center) / env.width;
        const cplx amp = std::exp(-0.5 * u * u) * std::exp(I * (env.momentum * x));
        a(m) = amp * (Grid::component(m) == 1 ? env.u1 : env.u2);
    }
    WavePacket w(g, a);
    if (normalize) {
        if (w.norm == 0.0) throw DomainError("envelope vanishes on the grid");
        w.amplitudes /= w.norm;
        w.norm = w.recompute_norm();
    }
    return w;
}

Propagator::Propagator(const EigenSystem& es, const WavePacket& psi0, double span_tol)
    : es_(&es), psi0_(psi0) {
    if (es.dim() != psi0.amplitudes.size()) throw DomainError("packet and eigensystem sizes differ");
    const Eigen::VectorXcd call = es.coefficients(psi0.amplitudes);
    const double in_span = call.squaredNorm(), full = psi0.amplitudes.squaredNorm();
    if (full > 0.0 && full - in_span > span_tol * full)
        throw DomainError("packet is not contained in the span of the eigensystem (missing weight " +
                          std::to_string((full - in_span) / full) + ")");
    const double cut = 1e-26 * in_span;
    for (int k = 0; k < call.size(); ++k)
        if (std::norm(call(k)) > cut) active_.push_back(k);
    const int na = static_cast<int>(active_.size());
    c_.resize(na);
    lam_.resize(na);
    for (int i = 0; i < na; ++i) {
        c_(i) = call(active_[i]);
        lam_(i) = es.values(active_[i]);
    }
    if (es.phased) {
        Qa_.resize(es.dim(), na);
        for (int i = 0; i < na; ++i) Qa_.col(i) = es.Q.col(active_[i]);
    } else {
        Za_.resize(es.dim(), na);
        for (int i = 0; i < na; ++i) Za_.col(i) = es.Z.col(active_[i]);
    }
}

WavePacket Propagator::at(double t) const {
    Eigen::VectorXcd d(c_.size());
    for (int i = 0; i < c_.size(); ++i) d(i) = std::exp(cplx(0.0, -lam_(i) * t)) * c_(i);
    Eigen::VectorXcd v;
    if (es_->phased) {
        const Eigen::VectorXd vr = Qa_ * d.real(), vi = Qa_ * d.imag();
        v.resize(vr.size());
        for (int m = 0; m < vr.size(); ++m) v(m) = chain_phase(m) * cplx(vr(m), vi(m));
    } else {
        v = Za_ * d;
    }
    return WavePacket(psi0_.grid, v);
}

double Propagator::observable(double t, const std::string& key,
                              const std::function<double(double)>& weight) const {
    const Grid& g = psi0_.grid;
    const int na = static_cast<int>(c_.size());
    if (na > 1500) {
        // projected observable would be too large; evaluate in position space
        const WavePacket w = at(t);
        double s = 0.0;
        for (int m = 0; m < g.sites(); ++m) s += weight(g.site_pos(m)) * std::norm(w.amplitudes(m));
        return g.dx * s;
    }
    auto it = obs_.find(key);
    if (it == obs_.end()) {
        Eigen::VectorXd w(g.sites());
        for (int m = 0; m < g.sites(); ++m) w(m) = weight(g.site_pos(m));
        Eigen::MatrixXcd X;
        if (es_->phased) {
            const Eigen::MatrixXd WQ = w.asDiagonal() * Qa_;
            X = (Qa_.transpose() * WQ).cast<cplx>();
        } else {
            X = Za_.adjoint() * (w.asDiagonal() * Za_);
        }
        it = obs_.emplace(key, std::move(X)).first;
    }
    Eigen::VectorXcd d(na);
    for (int i = 0; i < na; ++i) d(i) = std::exp(cplx(0.0, -lam_(i) * t)) * c_(i);
    return g.dx * (d.adjoint() * (it->second * d))(0, 0).real();
}

double Propagator::moment(double t, double p) const {
    std::ostringstream key;
    key.precision(17);
    key << "moment:" << p;
    return observable(t, key.str(), [p](double x) { return std::pow(std::abs(x), p); });
}

double Propagator::window_mass(double t, const Interval& w) const {
    std::ostringstream key;
    key.precision(17);
    key << "window:" << w.lo << ':' << w.hi;
    return observable(t, key.str(), [w](double x) { return w.contains(x) ? 1.0 : 0.0; });
}

WavePacket evolve(const EigenSystem& es, const WavePacket& psi0, double t) {
    return Propagator(es, psi0).at(t);
}

double moment(const WavePacket& psi, double p) {
    if (!(p > 0.0)) throw DomainError("moment order must be positive");
    double s = 0.0;
    for (int m = 0; m < psi.grid.sites(); ++m)
        s += std::pow(std::abs(psi.grid.site_pos(m)), p) * std::norm(psi.amplitudes(m));
    return psi.grid.dx * s;
}

double packet_extent(const WavePacket& psi, double eps) {
    const Grid& g = psi.grid;
    std::vector<std::pair<double, double>> r;
    r.reserve(g.sites());
    double total = 0.0;
    for (int m = 0; m < g.sites(); ++m) {
        const double w = g.dx * std::norm(psi.amplitudes(m));
        r.emplace_back(std::abs(g.site_pos(m)), w);
        total += w;
    }
    std::sort(r.begin(), r.end(), [](auto& a, auto& b) { return a.first > b.first; });
    // walk inwards from the far end while the outside mass stays below eps
    double outside = 0.0;
    for (const auto& [rad, w] : r) {
        if (outside + w > eps * total) return rad;
        outside += w;
    }
    return 0.0;
}

double horizon(const WavePacket& psi0, double eps) {
    return psi0.grid.edge_distance() - packet_extent(psi0, eps);
}

double heisenberg_time(const EigenSystem& es, const Interval& delta) {
    const std::vector<int> idx = es.indices_in(delta);
    if (idx.size() < 2) throw DomainError("fewer than two eigenvalues in the window");
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < idx.size(); ++i)
        gap = std::min(gap, es.values(idx[i + 1]) - es.values(idx[i]));
    return 1.0 / gap;
}

CesaroResult cesaro(const std::function<double(double)>& f, double T, const QuadratureOptions& q) {
    if (!(T > 0.0)) throw DomainError("Cesaro mean needs T > 0");
    int n = std::max(q.initial_samples, 2);
    std::vector<double> vals(n + 1);
    for (int i = 0; i <= n; ++i) vals[i] = f(T * i / n);
    auto trap = [&](const std::vector<double>& v) {
        double s = 0.5 * (v.front() + v.back());
        for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
        return s / static_cast<double>(v.size() - 1);
    };
    CesaroResult res;
    double prev = trap(vals);
    while (true) {
        if (2 * n > q.max_samples) {
            res.value = prev;
            res.samples = n;
            res.last_change = std::numeric_limits<double>::quiet_NaN();
            return res;
        }
        std::vector<double> nv(2 * n + 1);
        for (int i = 0; i <= n; ++i) nv[2 * i] = vals[i];
        for (int i = 0; i < n; ++i) nv[2 * i + 1] = f(T * (2 * i + 1) / (2.0 * n));
        vals.swap(nv);
        n *= 2;
        const double cur = trap(vals);
        const double change = std::abs(cur - prev) / std::max(std::abs(cur), 1e-300);
        prev = cur;
        if (change < q.rel_tol) {
            res.value = cur;
            res.samples = n;
            res.last_change = change;
            return res;
        }
    }
}

CesaroResult cesaro_moment(const Propagator& prop, double p, double T, double horizon_limit,
                           const QuadratureOptions& q) {
    if (T > horizon_limit)
        throw DomainError("T = " + std::to_string(T) + " exceeds the causality horizon " +
                          std::to_string(horizon_limit));
    return cesaro([&](double t) { return prop.moment(t, p); }, T, q);
}

std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw DomainError("bad log grid");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    g.back() = hi;
    return g;
}

BallisticReport fit_ballistic_values(double p, const std::vector<double>& Ts,
                                     const std::vector<double>& values, double horizon_limit) {
    BallisticReport r;
    r.p = p;
    r.T_values = Ts;
    r.cesaro_values = values;
    r.horizon = horizon_limit;
    const PowerFit f = fit_power_law(Ts, values);
    r.fitted_exponent = f.exponent;
    r.fitted_constant = f.constant;
    r.fit_residual = f.residual;
    return r;
}

BallisticReport ballistic_fit(const Propagator& prop, double p, const std::vector<double>& Ts,
                              double horizon_limit, const QuadratureOptions& q) {
    if (Ts.size() < 2) throw DomainError("ballistic fit needs at least two times");
    const auto [mn, mx] = std::minmax_element(Ts.begin(), Ts.end());
    if (*mx < 10.0 * *mn * (1.0 - 1e-9)) throw DomainError("T grid must span at least one decade");
    std::vector<double> vals;
    for (double T : Ts) vals.push_back(cesaro_moment(prop, p, T, horizon_limit, q).value);
    return fit_ballistic_values(p, Ts, vals, horizon_limit);
}

CausalityReport causality_check(const Propagator& prop, double p, const std::vector<double>& ts,
                                double x0, double slack) {
    CausalityReport r;
    r.p = p;
    r.x0 = x0;
    r.slack = slack;
    const double n2 = prop.initial().norm_squared();
    for (double t : ts) {
        const double m = prop.moment(t, p);
        const double bound = std::pow(x0 + t, p) * n2;
        const double ratio = m / bound;
        r.t_values.push_back(t);
        r.ratios.push_back(ratio);
        const bool ok = ratio <= 1.0 + slack;
        r.passed.push_back(ok);
        r.all_passed = r.all_passed && ok;
        r.max_ratio = std::max(r.max_ratio, ratio);
    }
    return r;
}

LastInequalityReport last_inequality_check(const Propagator& prop, const LipschitzCertificate& cert,
                                           const Interval& window, const std::vector<double>& Ts,
                                           double hs_value, double recurrence_time,
                                           double horizon_limit, const QuadratureOptions& q) {
    LastInequalityReport r;
    r.recurrence_time = recurrence_time;
    r.lipschitz_ok = cert.ok;
    if (!cert.ok) {
        r.note = "Lipschitz precondition violated: " + cert.note;
        return r;
    }
    for (double T : Ts) {
        if (T > horizon_limit) throw DomainError("T exceeds the causality horizon");
        if (T > recurrence_time) r.beyond_recurrence = true;
        const CesaroResult c = cesaro([&](double t) { return prop.window_mass(t, window); }, T, q);
        r.T_values.push_back(T);
        r.averages.push_back(c.value);
        r.products.push_back(T * c.value);
    }
    if (r.beyond_recurrence) r.note = "warning: T grid exceeds the recurrence time 1/min-gap";
    std::vector<double> s = r.products;
    std::sort(s.begin(), s.end());
    const std::size_t n = s.size();
    r.median = (n % 2 == 1) ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
    r.max = s.back();
    r.growth_ratio = r.median > 0.0 ? r.max / r.median : std::numeric_limits<double>::infinity();
    r.passed = r.growth_ratio <= 1.5;
    r.reference = cert.alpha * hs_value * hs_value;
    r.implied_constant = r.reference > 0.0 ? r.max / r.reference : 0.0;
    return r;
}

CesaroResult rage_window(const Propagator& prop, double R, double T, const QuadratureOptions& q) {
    if (prop.initial().grid.geometry != Geometry::HalfLine)
        throw DomainError("RAGE window is defined on the half-line");
    const Interval w{0.0, R};
    return cesaro([&](double t) { return prop.window_mass(t, w); }, T, q);
}

}  // namespace dirac
