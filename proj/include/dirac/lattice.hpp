#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "dirac/grid.hpp"
#include "dirac/potentials.hpp"
#include "dirac/types.hpp"

namespace dirac {

// Hermitian tridiagonal discretization on the staggered chain (see Grid for
// the layout). H(m,m+1) = upper[m]; an optional wrap coupling H(N-1,0)
// closes the chain into a ring for dispersion checks.
struct DiracMatrix {
    Grid grid;
    Eigen::VectorXd diag;
    Eigen::VectorXcd upper;
    bool periodic = false;
    cplx wrap{0.0, 0.0};

    std::optional<double> k;
    std::optional<double> xi;
    std::optional<double> alpha;
    double mass = 0.0;

    int size() const { return static_cast<int>(diag.size()); }
    Eigen::MatrixXcd dense() const;
    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
    // True when every off-diagonal entry is purely imaginary, so that
    // diag(i^m) maps the matrix onto a real symmetric tridiagonal one.
    bool real_tridiagonal_form() const;
    void write_triplets(std::ostream& os) const;
};

// Generic chain assembly: diagonal S(x) + mz(x) sigma3, sigma2 W(x) on the
// bonds and the staggered kinetic stencil -i/dx.
DiracMatrix assemble_chain(const Grid& grid, const Field& S, const Field& W,
                           const Field& mz);

DiracMatrix assemble_line(const Grid& grid, const Field& V, const Field& A,
                          double xi = 0.0, double m = 0.0);
DiracMatrix assemble_halfline(const Grid& grid, const Field& V, const Field& A,
                              double k, double m = 0.0,
                              std::optional<double> alpha = std::nullopt);
DiracMatrix assemble_line(const Grid& grid, const PotentialSpec& spec,
                          double xi = 0.0, double m = 0.0);
DiracMatrix assemble_halfline(const Grid& grid, const PotentialSpec& spec,
                              double k, double m = 0.0,
                              std::optional<double> alpha = std::nullopt);
// Free massless ring with n nodes (2n sites) used for the dispersion check.
DiracMatrix assemble_periodic_free(int n, double dx, double m = 0.0);

struct EigenSystem {
    Grid grid;
    Eigen::VectorXd values;
    // Either real eigenvectors of the phase-rotated chain (phased) or
    // complex eigenvectors of the dense matrix.
    Eigen::MatrixXd Q;
    Eigen::MatrixXcd Z;
    bool phased = true;
    bool complete = true;

    int count() const { return static_cast<int>(values.size()); }
    int dim() const { return phased ? static_cast<int>(Q.rows()) : static_cast<int>(Z.rows()); }
    Eigen::VectorXcd vector(int k) const;
    // c = V^dagger psi (l2 without the dx weight)
    Eigen::VectorXcd coefficients(const Eigen::VectorXcd& psi) const;
    Eigen::VectorXcd synthesize(const Eigen::VectorXcd& c) const;
    std::vector<int> indices_in(const Interval& d) const;
    double max_residual(const DiracMatrix& H) const;
};

EigenSystem eigensystem(const DiracMatrix& H);
// Only eigenpairs with eigenvalue in [lo, hi].
EigenSystem eigensystem(const DiracMatrix& H, double lo, double hi);

Eigen::MatrixXcd spectral_projector(const EigenSystem& es, const Interval& delta);
Eigen::VectorXcd apply_spectral_projector(const EigenSystem& es, const Interval& delta,
                                          const Eigen::VectorXcd& psi);

// Diagonal phase i^m relating the chain to its real symmetric form.
cplx chain_phase(int m);

}  // namespace dirac
