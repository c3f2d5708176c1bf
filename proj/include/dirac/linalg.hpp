#pragma once

#include <functional>
#include <vector>

#include "dirac/types.hpp"

namespace dirac {

struct DiracMatrix;

// LU factorization of H - z for a tridiagonal DiracMatrix (zgttrf).
class TridiagSolver {
public:
    TridiagSolver(const DiracMatrix& H, cplx z);
    // Solves (H - z) x = b, or (H - z)^dagger x = b when adjoint is set.
    Eigen::VectorXcd solve(const Eigen::VectorXcd& b, bool adjoint = false) const;
    Eigen::MatrixXcd solve(const Eigen::MatrixXcd& B, bool adjoint = false) const;
    int size() const { return n_; }

private:
    int n_;
    std::vector<cplx> dl_, d_, du_, du2_;
    std::vector<int> ipiv_;
};

// General complex band matrix with LU (zgbtrf/zgbtrs).
class BandMatrix {
public:
    BandMatrix(int n, int kl, int ku);
    void set(int i, int j, cplx v);
    void add(int i, int j, cplx v);
    cplx get(int i, int j) const;
    bool in_band(int i, int j) const { return j - i <= ku_ && i - j <= kl_; }
    int size() const { return n_; }
    int kl() const { return kl_; }
    int ku() const { return ku_; }
    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
    Eigen::MatrixXcd dense() const;
    void factor();
    Eigen::VectorXcd solve(const Eigen::VectorXcd& b, bool adjoint = false) const;

private:
    int n_, kl_, ku_, ldab_;
    std::vector<cplx> ab_;
    std::vector<int> ipiv_;
    bool factored_ = false;
};

// Real symmetric tridiagonal eigenproblem through MRRR (dstemr). With
// lo < hi only eigenvalues inside [lo, hi] are returned.
struct TridiagEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};
TridiagEigen symmetric_tridiagonal_eigen(const Eigen::VectorXd& d, const Eigen::VectorXd& e,
                                         bool vectors = true, double lo = 0.0, double hi = -1.0);

// Largest singular value of a linear operator given by forward and adjoint
// applications, by power iteration on A^dagger A.
double operator_norm(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply,
                     const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& adjoint,
                     int n, double rel_tol = 1e-7, int max_iter = 500, unsigned seed = 7);

// Least-squares fit y = C x^a in log-log coordinates.
struct PowerFit {
    double exponent = 0.0;
    double constant = 0.0;
    double residual = 0.0;  // rms of log residuals
};
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

// Observed convergence orders log2(e_k / e_{k+1}) for halved steps.
std::vector<double> observed_orders(const std::vector<double>& errors);

}  // namespace dirac
