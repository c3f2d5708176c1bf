#pragma once

#include <vector>

#include "dirac/lattice.hpp"
#include "dirac/linalg.hpp"
#include "dirac/potentials.hpp"

namespace dirac {

using NodeBlocks = std::vector<Eigen::Matrix2cd>;  // one 2x2 per node, (psi1, psi2) basis

// Applies per-node 2x2 blocks to a chain vector.
Eigen::VectorXcd apply_node_blocks(const NodeBlocks& B, const Eigen::VectorXcd& v);
NodeBlocks adjoint_blocks(const NodeBlocks& B);

// Running integral Phi(x) = int_0^x V of node samples, trapezoid rule with
// the segment from 0 to the node nearest 0 taken at constant V.
std::vector<double> cumulative_from_zero(const std::vector<double>& x, const std::vector<double>& V);

// Per-node exp(i sigma1 Phi(x_j)).
NodeBlocks gauge_unitary(const std::vector<double>& V_nodes, const Grid& grid);

// Gauge on the whole chain: U = exp(iG), G = {Phi(X), S}/2 with S the
// nearest-neighbour average. It commutes with the staggered stencil up to
// second order, which the node-local unitary does not.
class ChainGauge {
public:
    ChainGauge(const Grid& grid, const Field& V);
    Eigen::VectorXcd apply(const Eigen::VectorXcd& v, bool inverse = false) const;
    const std::vector<double>& phi() const { return phi_; }

private:
    std::vector<double> phi_;
    Eigen::VectorXd lambda_;
    Eigen::MatrixXd Q_;
};

struct GaugeCovarianceReport {
    double dx = 0.0;
    double chain_error = 0.0;  // || U R_V U^dagger - R_0 || with the chain gauge
    double node_error = 0.0;   // same with the per-node unitary (diagnostic)
    double trim = 0.1;
};

// Interior-trimmed operator norm of the intertwining defect at z.
GaugeCovarianceReport gauge_covariance(const Grid& grid, const Field& V, cplx z = I,
                                       double trim = 0.1, bool with_node_gauge = true);

struct BoostData {
    Hypothesis direction = Hypothesis::H1;
    std::vector<double> x;  // sample points: node centres x_j + dx/4
    std::vector<double> beta, theta, gamma, theta_prime;
    NodeBlocks M, Minv, expF, expmF, F;
    double theta_max = 0.0;
};

BoostData boost_fields(const PotentialSpec& spec, const Grid& grid, Hypothesis direction);

// Boosted operator M^{-1} e^{-F} h e^{F} in closed form: with h = kinetic +
// S + sigma2 W + m sigma3 it is kinetic + gamma(S + beta W)
// + sigma2 gamma(W + beta S) + m sigma3 + sigma3 theta'/2.
struct OperatorInputs {
    double xi = 0.0;  // line
    double k = 0.0;   // half-line
    double mass = 0.0;
};
DiracMatrix assemble_boosted(const PotentialSpec& spec, const Grid& grid, const OperatorInputs& op,
                             Hypothesis direction);
DiracMatrix assemble_plain(const PotentialSpec& spec, const Grid& grid, const OperatorInputs& op);

// M * htilde - z as a band matrix (kl = ku = 2).
BandMatrix boosted_shifted(const DiracMatrix& htilde, const BoostData& bd, cplx z);

struct ResolventIdentityReport {
    double dx = 0.0;
    double r1 = 0.0;
    double norm_boosted = 0.0;  // ||(M htilde - z)^{-1}||
    double norm_plain = 0.0;    // ||(h - z)^{-1}||
    double bound = 0.0;         // norm_plain * max e^{|theta|}
    bool bound_ok = false;
    double trim = 0.1;
};

ResolventIdentityReport verify_resolvent_identity(const DiracMatrix& h, const DiracMatrix& htilde,
                                                  const BoostData& bd, cplx z = I,
                                                  double trim = 0.1);

// || e^{-F} K e^{F} phi - M (K + sigma3 theta'/2) phi || / ||phi|| with K the
// free kinetic stencil, the discrete form of the free boost identity.
double lorentz_free_defect(const BoostData& bd, const Grid& grid, const PotentialSpec& spec,
                           const Eigen::VectorXcd& phi);

// Interior mask of chain sites (|x| or x within the trimmed range).
std::vector<int> interior_sites(const Grid& grid, double trim);

}  // namespace dirac
