#include "dirac/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>

#include "dirac/dynamics.hpp"
#include "dirac/fibers2d.hpp"
#include "dirac/lattice.hpp"
#include "dirac/linalg.hpp"
#include "dirac/potentials.hpp"
#include "dirac/resolvent_hs.hpp"
#include "dirac/spectral.hpp"
#include "dirac/transforms.hpp"

namespace dirac {

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double v, int prec = 4) {
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    return os.str();
}

std::string list(const std::vector<double>& v, int prec = 4) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + num(v[i], prec);
    return s + "]";
}

PotentialSpec linear_field(Geometry g) {
    PotentialSpec s;
    s.geometry = g;
    s.v2.kind = Tail::Kind::Linear;
    s.v2.slope = 1.0;
    s.a2.kind = Tail::Kind::Linear;
    s.a2.slope = 0.5;
    s.a2.ramp_power = 2;
    return s;
}

// Composite Simpson rule, independent of the library quadratures.
double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    const double h = (b - a) / (2 * panels);
    double s = f(a) + f(b);
    for (int i = 1; i < 2 * panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// int_I int_R |K(x,y)|_F^2 dy dx for the free line kernel, |K|_F^2 = e^{-2|x-y|}.
double line_kernel_hs_squared(double lo, double hi) {
    auto inner = [](double x) {
        auto k = [x](double y) { return std::exp(-2.0 * std::abs(x - y)); };
        return simpson(k, x - 30.0, x, 1500) + simpson(k, x, x + 30.0, 1500);
    };
    return simpson(inner, lo, hi, 100);
}

// Packet state shared between the dynamical criteria.
struct Packet {
    std::string label;
    Grid grid;
    DiracMatrix H;
    std::unique_ptr<EigenSystem> es;
    Interval delta;
    ProxyState proxy;
    std::unique_ptr<Propagator> prop;
    double horizon = 0.0;
    double heisenberg = 0.0;
    double t_hi = 0.0;
    std::vector<double> Ts;
};

std::unique_ptr<Packet> make_proxy_packet(const std::string& label, const Grid& g, DiracMatrix H,
                                          const Interval& delta, const Envelope& env, double taper) {
    auto p = std::make_unique<Packet>();
    p->label = label;
    p->grid = g;
    p->H = std::move(H);
    p->delta = delta;
    p->es = std::make_unique<EigenSystem>(eigensystem(p->H, delta.lo - 0.5, delta.hi + 0.5));
    ProxyOptions po;
    po.taper = taper;
    p->proxy = ac_proxy_state(*p->es, delta, env, po);
    p->prop = std::make_unique<Propagator>(*p->es, p->proxy.psi);
    p->horizon = horizon(p->proxy.psi);
    p->heisenberg = heisenberg_time(*p->es, delta);
    p->t_hi = std::min(p->horizon, p->heisenberg);
    p->Ts = log_grid(p->t_hi / 10.0, p->t_hi, 8);
    return p;
}

class Suite {
public:
    explicit Suite(std::ostream& out, bool verbose) : out_(out), verbose_(verbose) {}

    AcceptanceLine run(int id) {
        AcceptanceLine line;
        line.id = id;
        const auto t0 = Clock::now();
        try {
            switch (id) {
            case 1: c1(line); break;
            case 2: c2(line); break;
            case 3: c3(line); break;
            case 4: c4(line); break;
            case 5: c5(line); break;
            case 6: c6(line); break;
            case 7: c7(line); break;
            case 8: c8(line); break;
            case 9: c9(line); break;
            case 10: c10(line); break;
            case 11: c11(line); break;
            default: throw DomainError("unknown criterion");
            }
        } catch (const std::exception& e) {
            line.pass = false;
            line.detail += std::string(line.detail.empty() ? "" : "; ") + "error: " + e.what();
        }
        line.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        elapsed_ += line.seconds;
        return line;
    }

private:
    std::ostream& out_;
    bool verbose_;
    double elapsed_ = 0.0;
    std::unique_ptr<Packet> line_field_, half_field_, free_line_;

    void note(const std::string& s) {
        if (verbose_) out_ << "  .. " << s << std::endl;
    }

    Packet& line_field() {
        if (!line_field_) {
            const Grid g = make_line_grid(50.0, 0.025);
            Envelope env;
            env.width = 1.0;
            line_field_ = make_proxy_packet("line V=x A=x/2", g, assemble_line(g, linear_field(Geometry::Line)),
                                            {-3.0, 3.0}, env, 0.5);
        }
        return *line_field_;
    }

    Packet& half_field() {
        if (!half_field_) {
            const Grid g = make_halfline_grid(120.0, 0.03);
            Envelope env;
            env.width = 0.5;
            half_field_ = make_proxy_packet("half-line V=r A=r/2 k=1/2", g,
                                            assemble_halfline(g, linear_field(Geometry::HalfLine), 0.5),
                                            {-6.0, -0.5}, env, 0.5);
        }
        return *half_field_;
    }

    Packet& free_line() {
        if (!free_line_) {
            const Grid g = make_line_grid(50.0, 0.025);
            auto zero = [](double) { return 0.0; };
            Envelope env;
            env.width = 1.0;
            free_line_ = make_proxy_packet("free line", g, assemble_line(g, zero, zero), {-3.0, 3.0}, env, 0.5);
        }
        return *free_line_;
    }

    void c1(AcceptanceLine& L) {
        L.name = "free half-line resolvent kernel";
        const KernelCheck a = kernel_check(0.01), b = kernel_check(0.005);
        const double ratio = a.max_error / b.max_error;
        L.pass = b.max_error <= 0.02 && ratio >= 1.8;
        L.detail = "max|err| dx=0.01: " + num(a.max_error) + ", dx=0.005: " + num(b.max_error) +
                   " (tol 0.02), halving ratio " + num(ratio, 3) + " (need >= 1.8)";
    }

    void c2(AcceptanceLine& L) {
        L.name = "HS closed forms";
        auto zero = [](double) { return 0.0; };
        const Grid gh = make_halfline_grid(20.48, 0.005);
        const DiracMatrix hh = assemble_halfline(gh, zero, zero, 0.0);
        const double v = hs_window(hh, {1.0, 2.0});
        const double target = 1.0 - (std::exp(-2.0) - std::exp(-4.0)) / 4.0;
        const bool half_ok = std::abs(v * v - target) <= 0.03 * target;
        // the kernel identity |K|^2 = e^{-2|x1-x2|} + e^{-2(x1+x2)} integrates to |I| exactly
        const double exact_half = simpson([](double x1) {
            return simpson([x1](double x2) { return std::exp(-2 * std::abs(x1 - x2)) + std::exp(-2 * (x1 + x2)); },
                           0.0, x1, 400) +
                   simpson([x1](double x2) { return std::exp(-2 * std::abs(x1 - x2)) + std::exp(-2 * (x1 + x2)); },
                           x1, x1 + 30.0, 1500);
        }, 1.0, 2.0, 50);

        const Grid gl = make_line_grid(10.24, 0.005);
        const DiracMatrix hl = assemble_line(gl, zero, zero);
        const TridiagSolver S(hl, I);
        bool line_ok = true;
        std::vector<double> rel, consts;
        for (double w : {0.5, 1.0, 2.0, 4.0, 8.0}) {
            const double hs = hs_window(hl, S, {-0.5 * w, 0.5 * w});
            const double oracle = std::sqrt(line_kernel_hs_squared(-0.5 * w, 0.5 * w));
            rel.push_back(hs / oracle - 1.0);
            consts.push_back(hs / std::sqrt(w));
            line_ok = line_ok && std::abs(hs / oracle - 1.0) <= 0.03;
        }
        const double c_mean = std::accumulate(consts.begin(), consts.end(), 0.0) / consts.size();
        L.pass = half_ok && line_ok;
        L.detail = "half-line (1,2): HS^2 " + num(v * v, 6) + " vs 0.970745 (+-3%), exact kernel integral " +
                   num(exact_half, 6) + "; free line rel. dev. " + list(rel, 3) + " (+-3%); constant " +
                   num(c_mean, 4) + " vs 1/sqrt2 = 0.7071: 1/sqrt2 prefactor unconfirmed";
    }

    void c3(AcceptanceLine& L) {
        L.name = "HS sqrt|I| scaling under linear fields";
        const std::vector<double> widths{0.5, 1.0, 2.0, 4.0, 8.0};
        const PotentialSpec sl = linear_field(Geometry::Line), sh = linear_field(Geometry::HalfLine);
        const HypothesisReport h1 = check_hypothesis(sl, Hypothesis::H1);
        const HypothesisReport h2 = check_hypothesis(sh, Hypothesis::H2);
        const Grid gl = make_line_grid(20.48, 0.01);
        const HSScan a = hs_scan(assemble_line(gl, sl), centered_windows(widths));
        const Grid gh = make_halfline_grid(20.48, 0.01);
        const HSScan b = hs_scan(assemble_halfline(gh, sh, 0.5), anchored_windows(widths, 1.0));
        auto ok = [](const HSScan& s) {
            return std::abs(s.fit_exponent - 0.5) <= 0.05 && s.constant_spread() <= 1.3;
        };
        L.pass = h1.passed && h2.passed && ok(a) && ok(b);
        L.detail = "line: exponent " + num(a.fit_exponent) + ", spread " + num(a.constant_spread()) +
                   "; half-line k=1/2: exponent " + num(b.fit_exponent) + ", spread " +
                   num(b.constant_spread()) + " (need 0.50+-0.05, spread <= 1.3); H1 " +
                   (h1.passed ? "pass" : "FAIL") + ", H2 " + (h2.passed ? "pass" : "FAIL");
    }

    void c4(AcceptanceLine& L) {
        L.name = "gauge covariance";
        // balanced pairs so that int_0^x V vanishes outside the support
        PotentialSpec s;
        s.geometry = Geometry::Line;
        for (auto [c, a] : std::vector<std::pair<double, double>>{{1.0, 1.2}, {3.0, -1.2}, {-1.5, 0.8}, {-3.5, -0.8}}) {
            Piece p;
            p.kind = Piece::Kind::RaisedCosine;
            p.center = c;
            p.width = 1.0;
            p.amplitude = a;
            s.v1.push_back(p);
        }
        const Field V = s.V_field();
        std::vector<double> chain, node;
        for (double dx : {0.1, 0.05, 0.025, 0.0125}) {
            const GaugeCovarianceReport r = gauge_covariance(make_line_grid(8.0, dx), V, I, 0.1, true);
            chain.push_back(r.chain_error);
            node.push_back(r.node_error);
            note("gauge dx=" + num(dx) + " chain " + num(r.chain_error) + " node " + num(r.node_error));
        }
        const std::vector<double> ord = observed_orders(chain);
        L.pass = std::all_of(ord.begin(), ord.end(), [](double o) { return o >= 1.8; });
        L.detail = "defect " + list(chain) + ", observed orders " + list(ord, 3) +
                   " (need >= 1.8); node-local gauge orders " + list(observed_orders(node), 3);
    }

    void c5(AcceptanceLine& L) {
        L.name = "boost resolvent identity";
        PotentialSpec s = linear_field(Geometry::Line);
        Piece v1, a1;
        v1.width = a1.width = std::sqrt(0.125);
        v1.amplitude = 1.0;
        a1.center = 0.2;
        a1.amplitude = 0.3;
        s.v1.push_back(v1);
        s.a1.push_back(a1);
        std::vector<double> r1;
        bool bound_ok = true;
        std::string bounds;
        // The walls break the identity in a layer of a few decay lengths
        // 1/Im z; comparing on |x| <= 8 keeps that layer e^{-8} away.
        const double half = 16.0, trim = 0.5;
        for (double dx : {0.1, 0.05, 0.025, 0.0125}) {
            const Grid g = make_line_grid(half, dx);
            const BoostData bd = boost_fields(s, g, Hypothesis::H1);
            const ResolventIdentityReport r = verify_resolvent_identity(
                assemble_plain(s, g, {}), assemble_boosted(s, g, {}, Hypothesis::H1), bd, I, trim);
            r1.push_back(r.r1);
            bound_ok = bound_ok && r.bound_ok;
            bounds += (bounds.empty() ? "" : " ") + num(r.norm_boosted, 3) + "<=" + num(r.bound, 3);
        }
        PotentialSpec s0 = s;
        s0.a2 = Tail{};
        const Grid g0 = make_line_grid(half, 0.05);
        const ResolventIdentityReport z =
            verify_resolvent_identity(assemble_plain(s0, g0, {}), assemble_boosted(s0, g0, {}, Hypothesis::H1),
                                      boost_fields(s0, g0, Hypothesis::H1), I, trim);
        const std::vector<double> ord = observed_orders(r1);
        L.pass = bound_ok && z.r1 <= 1e-10 &&
                 std::all_of(ord.begin(), ord.end(), [](double o) { return o >= 0.9; });
        L.detail = "r1 " + list(r1) + ", orders " + list(ord, 3) + " (need >= 0.9); norm bound " + bounds +
                   "; theta=0 r1 " + num(z.r1, 3) + " (need <= 1e-10)";
    }

    void c6(AcceptanceLine& L) {
        L.name = "free ballistic closed form";
        auto zero = [](double) { return 0.0; };
        const Grid g = make_line_grid(40.0, 0.02);
        const DiracMatrix H = assemble_line(g, zero, zero);
        const EigenSystem es = eigensystem(H, -6.0, 6.0);
        Envelope env;
        env.center = 1.0;
        env.width = 2.0;
        env.u1 = 1.0;
        env.u2 = 0.5;
        const WavePacket psi = make_packet(g, env, true);
        const Propagator P(es, psi);
        // continuum Gaussian moments
        const double n2 = std::norm(env.u1) + std::norm(env.u2);
        const double x2 = env.center * env.center + 0.5 * env.width * env.width;
        const double cross = env.center * 2.0 * (std::conj(env.u1) * env.u2).real() / n2;
        const double hz = horizon(psi);
        double worst = 0.0;
        std::vector<double> Ts;
        for (int i = 1; i <= 8; ++i) Ts.push_back(0.5 * hz * i / 8.0);
        for (double T : Ts) {
            const double v = cesaro_moment(P, 2.0, T, hz).value;
            const double exact = x2 + T * cross + T * T / 3.0;
            worst = std::max(worst, std::abs(v / exact - 1.0));
        }
        L.pass = worst <= 0.02;
        L.detail = "max rel. deviation " + num(worst, 3) + " over T in (0, " + num(0.5 * hz) +
                   "] (horizon " + num(hz) + ", tol 0.02)";
    }

    bool ballistic(Packet& p, std::string& detail) {
        bool ok = true;
        const double x0 = packet_extent(p.proxy.psi);
        std::vector<double> ts = p.Ts;
        for (int i = 0; i <= 24; ++i) ts.push_back(p.t_hi * i / 24.0);
        std::sort(ts.begin(), ts.end());
        detail += p.label + ": cert " + (p.proxy.split.cert.ok ? "ok" : "FAILED") + ", T in [" +
                  num(p.Ts.front()) + ", " + num(p.Ts.back()) + "] (horizon " + num(p.horizon) +
                  ", Heisenberg " + num(p.heisenberg) + ")";
        ok = ok && p.proxy.split.cert.ok;
        for (double pw : {1.0, 2.0}) {
            const BallisticReport r = ballistic_fit(*p.prop, pw, p.Ts, p.horizon);
            const CausalityReport c = causality_check(*p.prop, pw, ts, x0, 0.05);
            const bool e_ok = std::abs(r.fitted_exponent - pw) <= 0.1 * pw;
            ok = ok && e_ok && c.all_passed;
            detail += ", p=" + num(pw) + " exponent " + num(r.fitted_exponent) + " causality max ratio " +
                      num(c.max_ratio, 3) + (c.all_passed ? "" : " (VIOLATED)");
        }
        return ok;
    }

    void c7(AcceptanceLine& L) {
        L.name = "ballistic exponents and causality";
        const bool h1 = check_hypothesis(linear_field(Geometry::Line), Hypothesis::H1).passed;
        const bool h2 = check_hypothesis(linear_field(Geometry::HalfLine), Hypothesis::H2).passed;
        std::string d1, d2;
        const bool a = ballistic(line_field(), d1);
        const bool b = ballistic(half_field(), d2);
        L.pass = h1 && h2 && a && b;
        L.detail = d1 + "; " + d2 + "; hypotheses " + (h1 && h2 ? "pass" : "FAIL") +
                   " (exponent within 10% of p, causality slack 5%)";
    }

    void c8(AcceptanceLine& L) {
        L.name = "Last inequality window";
        bool ok = true;
        std::string d;
        auto check = [&](Packet& p, const Interval& w) {
            const double hs = hs_window(p.H, w);
            const LastInequalityReport r =
                last_inequality_check(*p.prop, p.proxy.split.cert, w, p.Ts, hs, p.heisenberg, p.horizon);
            ok = ok && r.lipschitz_ok && r.passed;
            d += p.label + " I=(" + num(w.lo) + "," + num(w.hi) + "): max/median " + num(r.growth_ratio, 4) +
                 (r.lipschitz_ok ? "" : " (precondition failed)") + "; ";
        };
        check(free_line(), {-1.0, 1.0});
        check(line_field(), {-1.0, 1.0});
        check(half_field(), {1.0, 2.0});
        // an eigenvector must be rejected by the Lipschitz precondition
        Packet& p = line_field();
        const std::vector<int> idx = p.es->indices_in(p.delta);
        WavePacket ev(p.grid, p.es->vector(idx[idx.size() / 2]));
        ev.amplitudes /= ev.norm;
        ev.norm = ev.recompute_norm();
        const SpectralMeasure mu = spectral_measure(*p.es, ev, default_bins(*p.es, p.delta));
        const LipschitzSplit sp = lipschitz_split_auto(mu);
        const Propagator pe(*p.es, ev);
        const LastInequalityReport re =
            last_inequality_check(pe, sp.cert, {-1.0, 1.0}, p.Ts, 1.0, p.heisenberg, p.horizon);
        const bool rejected = !re.lipschitz_ok;
        L.pass = ok && rejected;
        L.detail = d + "eigenvector input " + (rejected ? "rejected" : "NOT rejected") + " (need max <= 1.5 median)";
    }

    void c9(AcceptanceLine& L) {
        L.name = "spectral split";
        bool ok = true;
        std::string d;
        for (Packet* p : {&free_line(), &line_field(), &half_field()}) {
            const LipschitzSplit& s = p->proxy.split;
            const WavePacket psi1 = lipschitz_component(*p->es, p->proxy.psi, s);
            const double total = p->proxy.psi.norm_squared();
            bool exact = true;
            for (int i = 0; i < p->proxy.measure.bins(); ++i) {
                exact = exact && s.mu1.masses[i] + s.mu2.masses[i] == p->proxy.measure.masses[i];
                exact = exact && (s.mu1.masses[i] == 0.0 || s.mu2.masses[i] == 0.0);
            }
            const bool quarter = s.cert.mu2_total < 0.25 * total;
            const bool three = psi1.norm_squared() >= 0.75 * total;
            ok = ok && s.cert.ok && quarter && three && exact;
            d += p->label + ": mu2/total " + num(s.cert.mu2_total / total, 3) + ", |psi1|^2/|psi|^2 " +
                 num(psi1.norm_squared() / total, 4) + (exact ? "" : ", partition NOT exact") + "; ";
        }
        // restriction identity on a complete eigensystem
        const Grid g = make_line_grid(10.0, 0.05);
        const DiracMatrix H = assemble_line(g, linear_field(Geometry::Line));
        const EigenSystem es = eigensystem(H);
        Envelope env;
        env.width = 0.7;
        env.momentum = 0.5;
        const WavePacket psi = make_packet(g, env, true);
        const Interval delta{-1.0, 1.0};
        const WavePacket ppsi(g, apply_spectral_projector(es, delta, psi.amplitudes));
        std::vector<double> edges;
        const double lo = es.values.minCoeff() - 0.1, hi = es.values.maxCoeff() + 0.1;
        for (int i = 0; i < 20; ++i) edges.push_back(lo + (delta.lo - lo) * i / 20.0);
        for (int i = 0; i < 20; ++i) edges.push_back(delta.lo + delta.width() * i / 20.0);
        for (int i = 0; i <= 20; ++i) edges.push_back(delta.hi + (hi - delta.hi) * i / 20.0);
        const SpectralMeasure m = spectral_measure(es, psi, edges), mp = spectral_measure(es, ppsi, edges);
        double dev = 0.0;
        for (int i = 0; i < m.bins(); ++i) {
            const bool inside = edges[i] >= delta.lo && edges[i + 1] <= delta.hi;
            dev = std::max(dev, std::abs(mp.masses[i] - (inside ? m.masses[i] : 0.0)));
        }
        ok = ok && dev <= 1e-10;
        L.pass = ok;
        L.detail = d + "projector restriction deviation " + num(dev, 3) + " (tol 1e-10)";
    }

    void c10(AcceptanceLine& L) {
        L.name = "2D aggregation";
        std::string d;
        bool ok = true;
        // translation family: five xi fibers of h(xi) with V=x, A=x/2
        {
            const int n2 = 5;
            const double dx2 = 2.0 * std::numbers::pi;
            const Grid g = make_line_grid(50.0, 0.025);
            const std::vector<double> xis = dual_grid(n2, dx2);
            const std::vector<double> amp{0.6, 0.9, 1.0, 0.8, 0.5};
            std::vector<std::unique_ptr<Packet>> fibers;
            FiberFamily fam;
            fam.kind = FiberKind::Translation;
            fam.n2 = n2;
            fam.dx2 = dx2;
            double tmin = std::numeric_limits<double>::infinity();
            for (int i = 0; i < n2; ++i) {
                Envelope env;
                env.width = 1.0;
                fibers.push_back(make_proxy_packet("xi=" + num(xis[i]), g,
                                                   assemble_line(g, linear_field(Geometry::Line), xis[i]),
                                                   {-3.0, 3.0}, env, 0.5));
                WavePacket s = fibers.back()->proxy.psi;
                s.amplitudes *= amp[i];
                s.norm = s.recompute_norm();
                fam.labels.push_back(xis[i]);
                fam.states.push_back(s);
                fam.weights.push_back(s.norm_squared());
                tmin = std::min(tmin, fibers.back()->t_hi);
            }
            const TranslationField f = inverse_translation(fam);
            const FiberFamily back = fiber_translation(f);
            const double cons = std::abs(back.weight_sum() - back.total) / back.total;
            const std::vector<double> Ts = log_grid(tmin / 10.0, tmin, 8);
            bool cut = false;
            for (double pw : {1.0, 2.0}) {
                std::vector<std::optional<BallisticReport>> reps;
                for (int i = 0; i < n2; ++i) {
                    const Propagator P(*fibers[i]->es, back.states[i]);
                    reps.push_back(ballistic_fit(P, pw, Ts, fibers[i]->horizon));
                }
                const AggregateReport a = aggregate_lower_bound(back, reps, pw, select_labels(back));
                try {
                    aggregate_lower_bound(back, reps, pw, {0});
                } catch (const DomainError&) {
                    cut = true;
                }
                ok = ok && std::abs(a.fitted_exponent - pw) <= 0.1 * pw && a.dominates;
                d += "translation p=" + num(pw) + " exponent " + num(a.fitted_exponent) + " (" +
                     std::to_string(a.selected.size()) + " labels, weight " +
                     num(a.selected_weight / a.total_weight, 3) + "); ";
            }
            ok = ok && cons <= 1e-6 && cut;
            d += "translation weight conservation " + num(cons, 3) + ", half-weight cut " +
                 (cut ? "enforced" : "NOT enforced") + "; ";
        }
        // rotation family: five channels of h_k with V=r, A=r/2 (B = 1)
        {
            const Grid g = make_halfline_grid(120.0, 0.03);
            const std::vector<double> ks{-1.5, -0.5, 0.5, 1.5, 2.5};
            const std::vector<double> amp{0.5, 0.9, 1.0, 0.7, 0.6};
            std::vector<std::unique_ptr<Packet>> ch;
            FiberFamily fam;
            fam.kind = FiberKind::Rotation;
            fam.Q = 16;
            double tmin = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < ks.size(); ++i) {
                Envelope env;
                env.width = 0.5;
                ch.push_back(make_proxy_packet("k=" + num(ks[i]), g,
                                               assemble_halfline(g, linear_field(Geometry::HalfLine), ks[i]),
                                               {-6.0, -0.5}, env, 0.5));
                WavePacket s = ch.back()->proxy.psi;
                s.amplitudes *= amp[i];
                s.norm = s.recompute_norm();
                fam.labels.push_back(ks[i]);
                fam.states.push_back(s);
                fam.weights.push_back(s.norm_squared());
                tmin = std::min(tmin, ch.back()->t_hi);
            }
            const PolarField f = inverse_rotation(fam);
            const FiberFamily back = fiber_rotation(f, ks);
            const double cons = std::abs(back.weight_sum() - back.total) / back.total;
            const std::vector<double> Ts = log_grid(tmin / 10.0, tmin, 8);
            bool cut = false;
            for (double pw : {1.0, 2.0}) {
                std::vector<std::optional<BallisticReport>> reps;
                for (std::size_t i = 0; i < ks.size(); ++i) {
                    const Propagator P(*ch[i]->es, back.states[i]);
                    reps.push_back(ballistic_fit(P, pw, Ts, ch[i]->horizon));
                }
                const AggregateReport a = aggregate_lower_bound(back, reps, pw, select_labels(back));
                try {
                    aggregate_lower_bound(back, reps, pw, {0});
                } catch (const DomainError&) {
                    cut = true;
                }
                ok = ok && std::abs(a.fitted_exponent - pw) <= 0.1 * pw && a.dominates;
                d += "rotation p=" + num(pw) + " exponent " + num(a.fitted_exponent) + " (" +
                     std::to_string(a.selected.size()) + " channels, weight " +
                     num(a.selected_weight / a.total_weight, 3) + "); ";
            }
            ok = ok && cons <= 1e-6 && cut;
            d += "rotation weight conservation " + num(cons, 3) + ", half-weight cut " + (cut ? "enforced" : "NOT enforced");
        }
        L.pass = ok;
        L.detail = d;
    }

    void c11(AcceptanceLine& L) {
        L.name = "invariant suite";
        std::vector<std::string> fails;
        auto expect = [&](bool c, const std::string& what) {
            if (!c) fails.push_back(what);
        };
        // Hermiticity
        {
            const Grid g = make_line_grid(5.0, 0.05);
            const Eigen::MatrixXcd H = assemble_line(g, linear_field(Geometry::Line), 0.3, 0.2).dense();
            expect((H - H.adjoint()).cwiseAbs().maxCoeff() <= 1e-14, "line hermiticity");
            const Grid gh = make_halfline_grid(5.0, 0.05);
            auto zero = [](double) { return 0.0; };
            const Eigen::MatrixXcd Hh = assemble_halfline(gh, zero, zero, 0.0, 0.1, 0.3).dense();
            expect((Hh - Hh.adjoint()).cwiseAbs().maxCoeff() <= 1e-14, "half-line hermiticity");
        }
        const Grid g = make_line_grid(10.0, 0.05);
        const DiracMatrix H = assemble_line(g, linear_field(Geometry::Line), 0.2);
        const EigenSystem es = eigensystem(H);
        Envelope env;
        env.width = 1.0;
        env.momentum = 0.7;
        env.u2 = 0.4;
        const WavePacket psi = make_packet(g, env, true);
        // unitarity
        {
            const Propagator P(es, psi);
            double dev = 0.0;
            for (double t : {0.5, 3.0, 7.0, 20.0})
                dev = std::max(dev, std::abs(P.at(t).recompute_norm() - psi.norm));
            expect(dev <= 1e-10, "unitarity");
        }
        // projector idempotence
        {
            const Eigen::MatrixXcd P = spectral_projector(es, {-1.0, 1.5});
            expect((P * P - P).cwiseAbs().maxCoeff() <= 1e-10, "projector idempotence");
            expect((P - P.adjoint()).cwiseAbs().maxCoeff() <= 1e-12, "projector hermiticity");
        }
        // Parseval: spectral measure and fibers
        {
            std::vector<double> edges;
            const double lo = es.values.minCoeff() - 1.0, hi = es.values.maxCoeff() + 1.0;
            for (int i = 0; i <= 50; ++i) edges.push_back(lo + (hi - lo) * i / 50.0);
            const SpectralMeasure m = spectral_measure(es, psi, edges);
            expect(std::abs(m.total - psi.norm_squared()) <= 1e-10, "spectral Parseval");
            TranslationField f;
            f.grid = g;
            f.n2 = 8;
            f.dx2 = 0.5;
            f.values.resize(g.sites(), 8);
            for (int j = 0; j < 8; ++j)
                f.values.col(j) = psi.amplitudes * std::exp(cplx(-0.1 * j * j, 0.3 * j));
            const FiberFamily fam = fiber_translation(f);
            expect(std::abs(fam.weight_sum() - f.norm_squared()) <= 1e-8 * f.norm_squared(), "fiber Parseval");
        }
        // HS additivity and monotonicity
        {
            const TridiagSolver S(H, I);
            const double a = hs_window(H, S, {-1.0, 0.0}), b = hs_window(H, S, {0.0, 1.0}),
                         ab = hs_window(H, S, {-1.0, 1.0}), big = hs_window(H, S, {-2.0, 2.0});
            expect(std::abs(ab * ab - a * a - b * b) <= 1e-10 * ab * ab, "HS additivity");
            expect(a <= ab && ab <= big, "HS monotonicity");
        }
        const double total = elapsed_;
        expect(total <= 900.0, "runtime");
        L.pass = fails.empty();
        std::string f;
        for (const auto& s : fails) f += (f.empty() ? "" : ", ") + s;
        L.detail = "hermiticity, unitarity, idempotence, Parseval, HS additivity/monotonicity " +
                   std::string(fails.empty() ? "green" : "FAILED: " + f) + "; runtime before this step " +
                   num(total, 4) + " s (limit 900 s)";
    }
};

}  // namespace

std::vector<AcceptanceLine> run_acceptance(std::ostream& out, const AcceptanceOptions& opt) {
    Suite suite(out, opt.verbose);
    std::vector<AcceptanceLine> lines;
    for (int id = 1; id <= 11; ++id) {
        if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end()) continue;
        AcceptanceLine l = suite.run(id);
        out << (l.pass ? "PASS" : "FAIL") << " [" << std::setw(2) << l.id << "] " << l.name << ": " << l.detail
            << " (" << std::fixed << std::setprecision(1) << l.seconds << " s)" << std::defaultfloat << std::endl;
        lines.push_back(std::move(l));
    }
    return lines;
}

}  // namespace dirac
