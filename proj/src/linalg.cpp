#include "dirac/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dirac/lattice.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace dirac {

TridiagSolver::TridiagSolver(const DiracMatrix& H, cplx z) : n_(H.size()) {
    if (H.periodic) throw DomainError("tridiagonal solver does not handle periodic chains");
    d_.resize(n_);
    dl_.resize(std::max(n_ - 1, 0));
    du_.resize(std::max(n_ - 1, 0));
    du2_.resize(std::max(n_ - 2, 0) + 1);
    ipiv_.resize(n_);
    for (int m = 0; m < n_; ++m) d_[m] = H.diag(m) - z;
    for (int m = 0; m + 1 < n_; ++m) {
        du_[m] = H.upper(m);
        dl_[m] = std::conj(H.upper(m));
    }
    const lapack_int info =
        LAPACKE_zgttrf(n_, dl_.data(), d_.data(), du_.data(), du2_.data(), ipiv_.data());
    if (info != 0) throw NumericError("tridiagonal factorization failed (info " + std::to_string(info) + ")");
}

Eigen::VectorXcd TridiagSolver::solve(const Eigen::VectorXcd& b, bool adjoint) const {
    Eigen::VectorXcd x = b;
    const lapack_int info =
        LAPACKE_zgttrs(LAPACK_COL_MAJOR, adjoint ? 'C' : 'N', n_, 1, dl_.data(), d_.data(),
                       du_.data(), du2_.data(), ipiv_.data(), x.data(), n_);
    if (info != 0) throw NumericError("tridiagonal solve failed");
    return x;
}

Eigen::MatrixXcd TridiagSolver::solve(const Eigen::MatrixXcd& B, bool adjoint) const {
    Eigen::MatrixXcd X = B;
    const lapack_int info = LAPACKE_zgttrs(LAPACK_COL_MAJOR, adjoint ? 'C' : 'N', n_,
                                           static_cast<lapack_int>(X.cols()), dl_.data(), d_.data(),
                                           du_.data(), du2_.data(), ipiv_.data(), X.data(), n_);
    if (info != 0) throw NumericError("tridiagonal solve failed");
    return X;
}

BandMatrix::BandMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1), ab_(static_cast<std::size_t>(ldab_) * n) {}

// LAPACK band storage with room for fill-in: A(i,j) at ab[kl+ku+i-j, j].
void BandMatrix::set(int i, int j, cplx v) {
    if (!in_band(i, j)) throw DomainError("entry outside band");
    ab_[static_cast<std::size_t>(j) * ldab_ + kl_ + ku_ + i - j] = v;
    factored_ = false;
}

void BandMatrix::add(int i, int j, cplx v) { set(i, j, get(i, j) + v); }

cplx BandMatrix::get(int i, int j) const {
    if (!in_band(i, j)) return 0.0;
    return ab_[static_cast<std::size_t>(j) * ldab_ + kl_ + ku_ + i - j];
}

Eigen::VectorXcd BandMatrix::apply(const Eigen::VectorXcd& x) const {
    if (factored_) throw DomainError("band matrix already overwritten by its factors");
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n_);
    for (int i = 0; i < n_; ++i) {
        const int j0 = std::max(0, i - kl_), j1 = std::min(n_ - 1, i + ku_);
        for (int j = j0; j <= j1; ++j) y(i) += get(i, j) * x(j);
    }
    return y;
}

Eigen::MatrixXcd BandMatrix::dense() const {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j) A(i, j) = get(i, j);
    return A;
}

void BandMatrix::factor() {
    ipiv_.resize(n_);
    const lapack_int info =
        LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_, ab_.data(), ldab_, ipiv_.data());
    if (info != 0) throw NumericError("band factorization failed (info " + std::to_string(info) + ")");
    factored_ = true;
}

Eigen::VectorXcd BandMatrix::solve(const Eigen::VectorXcd& b, bool adjoint) const {
    if (!factored_) throw DomainError("band matrix not factored");
    Eigen::VectorXcd x = b;
    const lapack_int info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, adjoint ? 'C' : 'N', n_, kl_, ku_, 1,
                                           ab_.data(), ldab_, ipiv_.data(), x.data(), n_);
    if (info != 0) throw NumericError("band solve failed");
    return x;
}

TridiagEigen symmetric_tridiagonal_eigen(const Eigen::VectorXd& d_in, const Eigen::VectorXd& e_in,
                                         bool vectors, double lo, double hi) {
    const lapack_int n = static_cast<lapack_int>(d_in.size());
    TridiagEigen out;
    if (n == 0) return out;
    const bool window = lo < hi;
    std::vector<double> d(d_in.data(), d_in.data() + n), e(n, 0.0), w(n);
    for (lapack_int i = 0; i + 1 < n; ++i) e[i] = e_in(i);
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
    lapack_int m = 0;
    lapack_logical tryrac = 1;
    double zdummy = 0.0;
    char range = 'A';
    lapack_int il = 0, iu = 0, nzc = n;
    if (window) {
        // Locate the window by index from the full set of eigenvalues. The
        // value-range mode sizes Z from its own Sturm count, which proved
        // unreliable for strongly graded diagonals.
        std::vector<double> dq = d, eq = e;
        lapack_int info = LAPACKE_dstemr(LAPACK_COL_MAJOR, 'N', 'A', n, dq.data(), eq.data(), 0.0, 0.0, 0, 0, &m,
                                         w.data(), &zdummy, 1, 1, isuppz.data(), &tryrac);
        if (info != 0) throw NumericError("dstemr failed (info " + std::to_string(info) + ")");
        const auto first = std::lower_bound(w.begin(), w.begin() + m, lo);
        const auto last = std::upper_bound(w.begin(), w.begin() + m, hi);
        if (first >= last) {
            out.values.resize(0);
            out.vectors.resize(n, 0);
            return out;
        }
        il = static_cast<lapack_int>(first - w.begin()) + 1;
        iu = static_cast<lapack_int>(last - w.begin());
        if (!vectors) {
            out.values = Eigen::Map<Eigen::VectorXd>(w.data() + il - 1, iu - il + 1);
            return out;
        }
        range = 'I';
        nzc = iu - il + 1;
        tryrac = 1;
    }
    std::vector<double> z;
    if (vectors) z.assign(static_cast<std::size_t>(n) * nzc, 0.0);
    lapack_int info = LAPACKE_dstemr(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', range, n, d.data(), e.data(), 0.0, 0.0,
                                     il, iu, &m, w.data(), vectors ? z.data() : &zdummy, vectors ? n : 1,
                                     vectors ? nzc : 1, isuppz.data(), &tryrac);
    if (info != 0) throw NumericError("dstemr failed (info " + std::to_string(info) + ")");
    out.values = Eigen::Map<Eigen::VectorXd>(w.data(), m);
    if (vectors) out.vectors = Eigen::Map<Eigen::MatrixXd>(z.data(), n, m);
    return out;
}

double operator_norm(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply,
                     const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& adjoint,
                     int n, double rel_tol, int max_iter, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::VectorXcd x(n);
    for (int i = 0; i < n; ++i) x(i) = cplx(gauss(rng), gauss(rng));
    x.normalize();
    double sigma = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        const Eigen::VectorXcd y = apply(x);
        const double s = y.norm();
        if (s == 0.0) return 0.0;
        Eigen::VectorXcd z = adjoint(y);
        const double zn = z.norm();
        if (zn == 0.0) return s;
        x = z / zn;
        if (it > 3 && std::abs(s - sigma) <= rel_tol * s) return s;
        sigma = s;
    }
    return sigma;
}

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DomainError("fit arrays differ in length");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("power-law fit needs positive data");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    std::vector<double> ux = lx;
    std::sort(ux.begin(), ux.end());
    ux.erase(std::unique(ux.begin(), ux.end()), ux.end());
    if (ux.size() < 2) throw DomainError("degenerate fit: fewer than two distinct abscissae");
    const double n = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    PowerFit f;
    f.exponent = sxy / sxx;
    const double b = my - f.exponent * mx;
    f.constant = std::exp(b);
    double ss = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (b + f.exponent * lx[i]);
        ss += r * r;
    }
    f.residual = std::sqrt(ss / n);
    return f;
}

std::vector<double> observed_orders(const std::vector<double>& errors) {
    std::vector<double> o;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) o.push_back(std::log2(errors[i] / errors[i + 1]));
    return o;
}

}  // namespace dirac
