#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dirac/lattice.hpp"

namespace dirac {

struct WavePacket {
    Grid grid;
    Eigen::VectorXcd amplitudes;
    double norm = 0.0;  // sqrt(dx * sum |a|^2), cached

    WavePacket() = default;
    WavePacket(const Grid& g, Eigen::VectorXcd a);
    double recompute_norm() const;
    double norm_squared() const { return norm * norm; }
};

double l2_norm(const Grid& g, const Eigen::VectorXcd& a);

// Spinor envelope on the chain: amplitude(x) = exp(-(x-c)^2/(2w^2)) e^{i q x}
// times the fixed spinor (u1, u2).
struct Envelope {
    double center = 0.0;
    double width = 1.0;
    double momentum = 0.0;
    cplx u1{1.0, 0.0};
    cplx u2{0.0, 0.0};
};
WavePacket make_packet(const Grid& g, const Envelope& env, bool normalize = true);

// Evolution of one initial state in an eigenbasis. Observables diagonal in
// position are evaluated through their projection onto the eigenvectors
// carrying the state, which keeps repeated time samples cheap.
class Propagator {
public:
    Propagator(const EigenSystem& es, const WavePacket& psi0, double span_tol = 1e-8);

    WavePacket at(double t) const;
    double moment(double t, double p) const;
    double window_mass(double t, const Interval& w) const;
    double observable(double t, const std::string& key, const std::function<double(double)>& weight) const;

    const WavePacket& initial() const { return psi0_; }
    const EigenSystem& eigensystem() const { return *es_; }
    const Eigen::VectorXcd& coefficients() const { return c_; }

private:
    const EigenSystem* es_;
    WavePacket psi0_;
    Eigen::VectorXcd c_;        // coefficients of the active modes
    std::vector<int> active_;  // eigen indices with nonzero weight
    Eigen::VectorXd lam_;
    Eigen::MatrixXd Qa_;   // active eigenvectors (phased)
    Eigen::MatrixXcd Za_;  // active eigenvectors (complex)
    mutable std::map<std::string, Eigen::MatrixXcd> obs_;
};

WavePacket evolve(const EigenSystem& es, const WavePacket& psi0, double t);
double moment(const WavePacket& psi, double p);

// Smallest radius R with mass outside |x| <= R at most eps * ||psi||^2.
double packet_extent(const WavePacket& psi, double eps = 1e-8);
// Edge distance minus the packet extent.
double horizon(const WavePacket& psi0, double eps = 1e-8);
// 1 / (smallest eigenvalue gap inside delta).
double heisenberg_time(const EigenSystem& es, const Interval& delta);

struct CesaroResult {
    double value = 0.0;
    int samples = 0;
    double last_change = 0.0;  // relative change of the final doubling
};

struct QuadratureOptions {
    int initial_samples = 32;
    int max_samples = 1 << 15;
    double rel_tol = 1e-3;
};

CesaroResult cesaro(const std::function<double(double)>& f, double T, const QuadratureOptions& q = {});
CesaroResult cesaro_moment(const Propagator& prop, double p, double T, double horizon_limit,
                           const QuadratureOptions& q = {});

struct BallisticReport {
    double p = 0.0;
    std::vector<double> T_values;
    std::vector<double> cesaro_values;
    double fitted_exponent = 0.0;
    double fitted_constant = 0.0;
    double fit_residual = 0.0;
    double horizon = 0.0;
};

std::vector<double> log_grid(double lo, double hi, int n);

BallisticReport ballistic_fit(const Propagator& prop, double p, const std::vector<double>& Ts,
                              double horizon_limit, const QuadratureOptions& q = {});
BallisticReport fit_ballistic_values(double p, const std::vector<double>& Ts,
                                     const std::vector<double>& values, double horizon_limit);

struct CausalityReport {
    double p = 0.0;
    double x0 = 0.0;
    double slack = 0.05;
    std::vector<double> t_values;
    std::vector<double> ratios;  // moment / ((x0+t)^p ||psi||^2)
    std::vector<bool> passed;
    bool all_passed = true;
    double max_ratio = 0.0;
};

CausalityReport causality_check(const Propagator& prop, double p, const std::vector<double>& ts,
                                double x0, double slack = 0.05);

struct LipschitzCertificate;  // spectral.hpp

struct LastInequalityReport {
    bool lipschitz_ok = false;
    std::string note;
    std::vector<double> T_values;
    std::vector<double> averages;  // <||1_I e^{-ith} psi||^2>_T
    std::vector<double> products;  // T * averages
    double median = 0.0;
    double max = 0.0;
    double growth_ratio = 0.0;  // max / median
    bool passed = false;
    double reference = 0.0;     // Lipschitz constant * HS^2 of the window
    double implied_constant = 0.0;  // max product / reference
    double recurrence_time = 0.0;
    bool beyond_recurrence = false;
};

LastInequalityReport last_inequality_check(const Propagator& prop, const LipschitzCertificate& cert,
                                           const Interval& window, const std::vector<double>& Ts,
                                           double hs_value, double recurrence_time,
                                           double horizon_limit, const QuadratureOptions& q = {});

// Cesaro average of ||1_{(0,R)} e^{-ith} psi0||^2.
CesaroResult rage_window(const Propagator& prop, double R, double T, const QuadratureOptions& q = {});

}  // namespace dirac
