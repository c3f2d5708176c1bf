#include "dirac/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dirac {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sgn(double x) { return (x > 0) - (x < 0); }

}  // namespace

double Piece::value(double x) const {
    const double u = x - center;
    switch (kind) {
    case Kind::Gaussian:
        if (std::abs(u) > cutoff * width) return 0.0;
        return amplitude * std::exp(-0.5 * u * u / (width * width));
    case Kind::Box:
        return (std::abs(u) <= 0.5 * width) ? amplitude : 0.0;
    case Kind::RaisedCosine:
        if (std::abs(u) >= width) return 0.0;
        return amplitude * 0.5 * (1.0 + std::cos(kPi * u / width));
    }
    return 0.0;
}

double Piece::derivative(double x) const {
    const double u = x - center;
    switch (kind) {
    case Kind::Gaussian:
        if (std::abs(u) > cutoff * width) return 0.0;
        return -u / (width * width) * value(x);
    case Kind::Box:
        return 0.0;
    case Kind::RaisedCosine:
        if (std::abs(u) >= width) return 0.0;
        return -amplitude * 0.5 * kPi / width * std::sin(kPi * u / width);
    }
    return 0.0;
}

double Piece::support_radius() const {
    switch (kind) {
    case Kind::Gaussian: return std::abs(center) + cutoff * width;
    case Kind::Box: return std::abs(center) + 0.5 * width;
    case Kind::RaisedCosine: return std::abs(center) + width;
    }
    return 0.0;
}

double Tail::profile(double x) const {
    switch (kind) {
    case Kind::None: return 0.0;
    case Kind::Linear: return slope * x;
    case Kind::Power: return slope * sgn(x) * std::pow(std::abs(x), exponent);
    case Kind::Constant: return value0;
    case Kind::Logistic:
        return value0 / (1.0 + std::exp(-rate * (std::abs(x) - r0 - ramp_width)));
    }
    return 0.0;
}

double Tail::profile_derivative(double x) const {
    switch (kind) {
    case Kind::None: return 0.0;
    case Kind::Linear: return slope;
    case Kind::Power: return slope * exponent * std::pow(std::abs(x), exponent - 1.0);
    case Kind::Constant: return 0.0;
    case Kind::Logistic: {
        const double e = std::exp(-rate * (std::abs(x) - r0 - ramp_width));
        return sgn(x) * value0 * rate * e / ((1.0 + e) * (1.0 + e));
    }
    }
    return 0.0;
}

double Tail::ramp(double x) const {
    const double a = std::abs(x);
    if (a <= r0) return 0.0;
    if (a >= r0 + ramp_width) return 1.0;
    const double r = 0.5 - 0.5 * std::cos(kPi * (a - r0) / ramp_width);
    return std::pow(r, ramp_power);
}

double Tail::ramp_derivative(double x) const {
    const double a = std::abs(x);
    if (a <= r0 || a >= r0 + ramp_width) return 0.0;
    const double t = kPi * (a - r0) / ramp_width;
    const double r = 0.5 - 0.5 * std::cos(t);
    const double dr = 0.5 * kPi / ramp_width * std::sin(t);
    return sgn(x) * ramp_power * std::pow(r, ramp_power - 1) * dr;
}

double Tail::value(double x) const {
    if (!active()) return 0.0;
    const double r = ramp(x);
    return r == 0.0 ? 0.0 : profile(x) * r;
}

double Tail::derivative(double x) const {
    if (!active() || std::abs(x) <= r0) return 0.0;
    return profile_derivative(x) * ramp(x) + profile(x) * ramp_derivative(x);
}

double PotentialSpec::V1(double x) const {
    double s = 0.0;
    for (const auto& p : v1) s += p.value(x);
    return s;
}

double PotentialSpec::A1(double x) const {
    double s = 0.0;
    for (const auto& p : a1) s += p.value(x);
    return s;
}

Field PotentialSpec::V_field() const {
    PotentialSpec c = *this;
    return [c](double x) { return c.V(x); };
}

Field PotentialSpec::A_field() const {
    PotentialSpec c = *this;
    return [c](double x) { return c.A(x); };
}

std::string to_string(Hypothesis h) {
    switch (h) {
    case Hypothesis::H1: return "H1";
    case Hypothesis::H2: return "H2";
    case Hypothesis::H1Prime: return "H1'";
    }
    return "?";
}

Hypothesis hypothesis_from_string(const std::string& s) {
    if (s == "H1") return Hypothesis::H1;
    if (s == "H2") return Hypothesis::H2;
    if (s == "H1'" || s == "H1p" || s == "H1prime") return Hypothesis::H1Prime;
    throw ConfigError("unknown hypothesis '" + s + "'");
}

double boost_beta(const PotentialSpec& s, Hypothesis dir, double x) {
    const double v = s.V2(x), a = s.A2(x);
    if (dir == Hypothesis::H1Prime) return a != 0.0 ? v / a : 0.0;
    return v != 0.0 ? a / v : 0.0;
}

double boost_beta_derivative(const PotentialSpec& s, Hypothesis dir, double x) {
    double num = s.A2(x), den = s.V2(x), dnum = s.dA2(x), dden = s.dV2(x);
    if (dir == Hypothesis::H1Prime) {
        std::swap(num, den);
        std::swap(dnum, dden);
    }
    if (den == 0.0) return 0.0;
    return (dnum * den - num * dden) / (den * den);
}

SampledFields sample_potential(const PotentialSpec& spec, const Grid& grid) {
    if (spec.geometry != grid.geometry)
        throw DomainError("grid geometry " + to_string(grid.geometry) +
                          " does not match potential geometry " + to_string(spec.geometry));
    SampledFields f;
    for (int j = 0; j < grid.n; ++j) {
        const double x = grid.node(j);
        if (spec.geometry == Geometry::HalfLine && x < 0.0)
            throw DomainError("half-line potential evaluated at negative x");
        f.x.push_back(x);
        f.V2.push_back(spec.V2(x));
        f.A2.push_back(spec.A2(x));
        f.V.push_back(spec.V1(x) + f.V2.back());
        f.A.push_back(spec.A1(x) + f.A2.back());
    }
    return f;
}

HypothesisReport check_hypothesis(const PotentialSpec& spec, Hypothesis which,
                                  const AuditOptions& audit) {
    HypothesisReport rep;
    rep.hypothesis = which;
    const bool prime = which == Hypothesis::H1Prime;
    const Tail& num = prime ? spec.v2 : spec.a2;  // numerator of the ratio
    const Tail& den = prime ? spec.a2 : spec.v2;
    const char* num_name = prime ? "V2" : "A2";
    const char* den_name = prime ? "A2" : "V2";

    rep.support_ok = true;
    if (which == Hypothesis::H2 && spec.geometry != Geometry::HalfLine) {
        rep.support_ok = false;
        rep.messages.push_back("H2 is a half-line hypothesis but the potential lives on the line");
    }
    if (which == Hypothesis::H1 && spec.geometry != Geometry::Line) {
        rep.support_ok = false;
        rep.messages.push_back("H1 is a line hypothesis; use H2 on the half-line");
    }
    if (den.active() && den.r0 <= 0.0) {
        rep.support_ok = false;
        rep.messages.push_back(std::string("condition i): ") + den_name +
                               " must vanish near 0 (r0 > 0)");
    }

    const double lo = spec.geometry == Geometry::Line ? -audit.extent : 0.5 * audit.step;
    const long npts = static_cast<long>(std::floor((audit.extent - lo) / audit.step)) + 1;
    double ratio_sup = 0.0, exact_sup = 0.0, fd_sup = 0.0;
    long support_violations = 0;
    double prev_beta = 0.0, prev_x = 0.0;
    bool have_prev = false;
    for (long i = 0; i < npts; ++i) {
        const double x = lo + i * audit.step;
        const double nv = num.value(x), dv = den.value(x);
        if (nv != 0.0 && dv == 0.0) ++support_violations;
        const double beta = boost_beta(spec, prime ? Hypothesis::H1Prime : Hypothesis::H1, x);
        if (dv != 0.0) {
            ratio_sup = std::max(ratio_sup, std::abs(nv / dv));
            exact_sup = std::max(exact_sup,
                                 std::abs(boost_beta_derivative(
                                     spec, prime ? Hypothesis::H1Prime : Hypothesis::H1, x)));
        }
        if (have_prev) fd_sup = std::max(fd_sup, std::abs(beta - prev_beta) / (x - prev_x));
        prev_beta = beta;
        prev_x = x;
        have_prev = true;
    }
    if (support_violations > 0) {
        rep.support_ok = false;
        std::ostringstream os;
        os << "condition i): supp(" << num_name << ") not contained in supp(" << den_name
           << ") at " << support_violations << " audit points";
        rep.messages.push_back(os.str());
    }
    rep.ratio_sup = ratio_sup;
    // A slope between neighbouring audit points can never exceed the sup of
    // the derivative (mean value theorem); if it does, the ratio jumps.
    if (fd_sup > exact_sup * 1.01 + 1e-6) {
        rep.deriv_sup = std::numeric_limits<double>::infinity();
        std::ostringstream os;
        os << "condition iii): " << num_name << "/" << den_name
           << " is discontinuous on the audit grid (difference slope " << fd_sup
           << " exceeds derivative sup " << exact_sup << ")";
        rep.messages.push_back(os.str());
    } else {
        rep.deriv_sup = exact_sup;
    }
    if (!(ratio_sup < 1.0)) {
        std::ostringstream os;
        os << "condition ii): sup |" << num_name << "/" << den_name << "| = " << ratio_sup
           << " is not below 1";
        rep.messages.push_back(os.str());
    }
    rep.theta_max = ratio_sup < 1.0 ? std::atanh(ratio_sup) : std::numeric_limits<double>::infinity();
    rep.passed = rep.support_ok && ratio_sup < 1.0 && std::isfinite(rep.deriv_sup);
    return rep;
}

std::vector<double> landau_gauge(const Field& B, const std::vector<double>& x) {
    // Integrate from 0 to each node along the sorted node list with Simpson
    // sub-steps on each interval; nodes may straddle 0.
    std::vector<double> A(x.size(), 0.0);
    auto seg = [&](double a, double b) {
        const double m = 0.5 * (a + b);
        return (b - a) / 6.0 * (B(a) + 4.0 * B(m) + B(b));
    };
    if (x.empty()) return A;
    // index of the node closest to 0
    std::size_t j0 = 0;
    for (std::size_t j = 1; j < x.size(); ++j)
        if (std::abs(x[j]) < std::abs(x[j0])) j0 = j;
    A[j0] = seg(0.0, x[j0]);
    for (std::size_t j = j0 + 1; j < x.size(); ++j) A[j] = A[j - 1] + seg(x[j - 1], x[j]);
    for (std::size_t j = j0; j-- > 0;) A[j] = A[j + 1] + seg(x[j + 1], x[j]);
    return A;
}

std::vector<double> rotational_gauge(const Field& B, const std::vector<double>& r) {
    static const double gx[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                 0.9602898564975363};
    static const double gw[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                 0.1012285362903763};
    auto gauss = [&](double a, double b) {
        const double m = 0.5 * (a + b), h = 0.5 * (b - a);
        double sum = 0.0;
        for (int q = 0; q < 4; ++q) {
            for (double sg : {-1.0, 1.0}) {
                const double s = m + sg * h * gx[q];
                sum += gw[q] * B(s) * s;
            }
        }
        return h * sum;
    };
    std::vector<double> A(r.size(), 0.0);
    for (std::size_t j = 0; j < r.size(); ++j) {
        const double R = r[j];
        if (R < 0.0) throw DomainError("rotational gauge needs r >= 0");
        if (R == 0.0) continue;
        const int panels = 64;
        double sum = 0.0;
        for (int p = 1; p < panels; ++p) sum += gauss(R * p / panels, R * (p + 1) / panels);
        // first panel by dyadic pieces towards 0; pieces of an integrable
        // B(s)s shrink geometrically, a stalled sequence means divergence
        double hi = R / panels, first = 0.0, last = 0.0;
        for (int level = 0; level < 60; ++level) {
            const double piece = gauss(0.5 * hi, hi);
            if (!std::isfinite(piece)) throw DomainError("B(s)s is not integrable at s = 0");
            if (level == 0) first = std::abs(piece);
            last = std::abs(piece);
            sum += piece;
            hi *= 0.5;
        }
        if (first > 0.0 && last > 1e-6 * first)
            throw DomainError("B(s)s is not integrable at s = 0");
        A[j] = sum / R;
    }
    return A;
}

}  // namespace dirac
