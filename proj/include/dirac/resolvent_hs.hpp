#pragma once

#include <vector>

#include "dirac/lattice.hpp"
#include "dirac/linalg.hpp"

namespace dirac {

// Dense (H - z)^{-1}. Intended for moderate sizes.
Eigen::MatrixXcd resolvent(const DiracMatrix& H, cplx z);

// Closed-form kernel of (sigma1(-i d/dx) - i)^{-1} on the half-line with
// psi1(0) = 0. Rows/columns in the (psi1, psi2) basis.
Eigen::Matrix2cd free_halfline_kernel(double x1, double x2);

struct HSOptions {
    cplx z = I;
    double delta_min = 1.0;  // half-line windows must start at or beyond this
};

// Continuum-normalized || 1_I (H - z)^{-1} ||_HS: the Frobenius norm of the
// rows whose sample position lies in I. The discrete kernel is R/dx and the
// continuum HS^2 carries dx^2, so the two factors cancel.
double hs_window(const DiracMatrix& H, const Interval& window, const HSOptions& opt = {});
double hs_window(const DiracMatrix& H, const TridiagSolver& shifted, const Interval& window,
                 const HSOptions& opt = {});

struct HSScan {
    std::vector<Interval> windows;
    std::vector<double> widths;
    std::vector<double> hs_values;
    double fit_exponent = 0.0;
    double fit_constant = 0.0;
    double fit_residual = 0.0;
    std::vector<double> constants;  // hs / sqrt|I|
    double constant_spread() const;  // max/min of constants
};

HSScan hs_scan(const DiracMatrix& H, const std::vector<Interval>& windows, const HSOptions& opt = {});
HSScan fit_scan(const std::vector<Interval>& windows, const std::vector<double>& values);

// Window families: centred at 0 on the line, left-anchored at delta_min on
// the half-line.
std::vector<Interval> centered_windows(const std::vector<double>& widths);
std::vector<Interval> anchored_windows(const std::vector<double>& widths, double delta_min = 1.0);

// Exact continuum values used as oracles.
double free_line_hs(double width);             // sqrt|I|
// |K(x1,x2)|_F^2 = e^{-2|x1-x2|} + e^{-2(x1+x2)}; integrated over x2 > 0 this
// is exactly 1, so the half-line value is |I| for any I in (0, inf).
double free_halfline_hs_squared(const Interval& I);

struct KernelCheck {
    double dx = 0.0;
    double max_error = 0.0;
    double max_kernel = 0.0;
};

// Compares columns of the discrete free half-line resolvent (alpha = 0) at
// z = i with the closed-form kernel. Columns at x2 in `columns`, rows up to
// row_limit, diagonal entries skipped.
KernelCheck kernel_check(double dx, double length = 20.0,
                         const std::vector<double>& columns = {0.5, 1.0, 2.0},
                         double row_limit = 10.0);

}  // namespace dirac
