#pragma once

#include <string>
#include <vector>

#include "dirac/grid.hpp"
#include "dirac/types.hpp"

namespace dirac {

// Compactly supported building block of V1 or A1.
struct Piece {
    enum class Kind { Gaussian, Box, RaisedCosine };
    Kind kind = Kind::Gaussian;
    double center = 0.0;
    double width = 1.0;
    double amplitude = 1.0;
    double cutoff = 6.0;  // gaussian support radius, in widths

    double value(double x) const;
    double derivative(double x) const;
    double support_radius() const;  // |x| bound of the support
};

// Tail primitive of V2 or A2. Vanishes identically for |x| < r0 and switches
// on through a raised-cosine ramp R(|x|) of the given width, raised to
// ramp_power (1 keeps the tail C^1, 2 makes ratios of two tails C^1 as well).
struct Tail {
    enum class Kind { None, Linear, Power, Constant, Logistic };
    Kind kind = Kind::None;
    double slope = 1.0;      // linear: slope*x; power: slope*|x|^exponent*sign
    double exponent = 1.0;
    double value0 = 0.0;     // constant level, logistic plateau
    double rate = 1.0;       // logistic steepness
    double r0 = 1.0;
    double ramp_width = 1.0;
    int ramp_power = 1;

    bool active() const { return kind != Kind::None; }
    double profile(double x) const;             // without the ramp
    double profile_derivative(double x) const;
    double ramp(double x) const;
    double ramp_derivative(double x) const;
    double value(double x) const;
    double derivative(double x) const;
};

struct PotentialSpec {
    Geometry geometry = Geometry::Line;
    std::vector<Piece> v1, a1;
    Tail v2, a2;

    double V1(double x) const;
    double A1(double x) const;
    double V2(double x) const { return v2.value(x); }
    double A2(double x) const { return a2.value(x); }
    double V(double x) const { return V1(x) + V2(x); }
    double A(double x) const { return A1(x) + A2(x); }
    double dV2(double x) const { return v2.derivative(x); }
    double dA2(double x) const { return a2.derivative(x); }

    Field V_field() const;
    Field A_field() const;
};

enum class Hypothesis { H1, H2, H1Prime };
std::string to_string(Hypothesis h);
Hypothesis hypothesis_from_string(const std::string& s);

// beta = A2/V2 (H1) or V2/A2 (H1'), set to 0 where the denominator vanishes.
double boost_beta(const PotentialSpec& s, Hypothesis dir, double x);
double boost_beta_derivative(const PotentialSpec& s, Hypothesis dir, double x);

struct SampledFields {
    std::vector<double> x, V, A, V2, A2;
};

SampledFields sample_potential(const PotentialSpec& spec, const Grid& grid);

struct HypothesisReport {
    Hypothesis hypothesis = Hypothesis::H1;
    bool passed = false;
    double ratio_sup = 0.0;
    double deriv_sup = 0.0;
    double theta_max = 0.0;
    bool support_ok = false;
    std::vector<std::string> messages;
};

struct AuditOptions {
    double extent = 50.0;  // audit range [-extent, extent] or (0, extent]
    double step = 0.001;   // default: 10x finer than a 0.01 solver grid
};

HypothesisReport check_hypothesis(const PotentialSpec& spec, Hypothesis which,
                                  const AuditOptions& audit = {});

// Running integral A(x) = int_0^x B, composite trapezoid on the grid nodes.
std::vector<double> landau_gauge(const Field& B, const std::vector<double>& x);
// A(r) = r^-1 int_0^r B(s) s ds.
std::vector<double> rotational_gauge(const Field& B, const std::vector<double>& r);

}  // namespace dirac
