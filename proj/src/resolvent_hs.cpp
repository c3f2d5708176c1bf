#include "dirac/resolvent_hs.hpp"

#include <algorithm>
#include <cmath>

namespace dirac {

Eigen::MatrixXcd resolvent(const DiracMatrix& H, cplx z) {
    if (z.imag() == 0.0) throw DomainError("resolvent needs Im z != 0");
    const int N = H.size();
    if (H.periodic) {
        Eigen::MatrixXcd A = H.dense();
        A.diagonal().array() -= z;
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
        return lu.inverse();
    }
    const TridiagSolver S(H, z);
    return S.solve(Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(N, N)));
}

Eigen::Matrix2cd free_halfline_kernel(double x1, double x2) {
    if (x1 < 0.0 || x2 < 0.0) throw DomainError("half-line kernel needs x1, x2 >= 0");
    if (x1 == x2) throw DomainError("kernel jumps on the diagonal x1 = x2");
    Eigen::Matrix2cd K;
    if (x1 > x2) {
        const double s = std::sinh(x2), c = std::cosh(x2), e = std::exp(-x1);
        K << s, c, s, c;
        K *= I * e;
    } else {
        const double s = std::sinh(x1), c = std::cosh(x1), e = std::exp(-x2);
        K << s, -s, -c, c;
        K *= I * e;
    }
    return K;
}

namespace {

void check_window(const DiracMatrix& H, const Interval& w, const HSOptions& opt) {
    if (!(w.hi > w.lo)) throw DomainError("empty window");
    const Grid& g = H.grid;
    if (g.geometry == Geometry::HalfLine) {
        if (w.lo < opt.delta_min)
            throw DomainError("half-line window touches the origin region: windows must lie in [" +
                              std::to_string(opt.delta_min) + ", inf)");
        if (w.hi > g.right_wall()) throw DomainError("window outside grid");
    } else {
        if (w.lo < g.left_wall() || w.hi > g.right_wall()) throw DomainError("window outside grid");
    }
}

}  // namespace

double hs_window(const DiracMatrix& H, const TridiagSolver& shifted, const Interval& window,
                 const HSOptions& opt) {
    check_window(H, window, opt);
    // ||1_I R||_F = ||R^dagger 1_I||_F; column m of R^dagger solves (H - z)^dagger y = e_m.
    const int N = H.size();
    std::vector<int> rows;
    for (int m = 0; m < N; ++m)
        if (window.contains(H.grid.site_pos(m))) rows.push_back(m);
    double total = 0.0;
    const int block = 256;
    for (std::size_t s = 0; s < rows.size(); s += block) {
        const int nb = static_cast<int>(std::min<std::size_t>(block, rows.size() - s));
        Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(N, nb);
        for (int c = 0; c < nb; ++c) E(rows[s + c], c) = 1.0;
        total += shifted.solve(E, true).squaredNorm();
    }
    return std::sqrt(total);
}

double hs_window(const DiracMatrix& H, const Interval& window, const HSOptions& opt) {
    const TridiagSolver S(H, opt.z);
    return hs_window(H, S, window, opt);
}

double HSScan::constant_spread() const {
    if (constants.empty()) return 0.0;
    const auto [mn, mx] = std::minmax_element(constants.begin(), constants.end());
    return *mx / *mn;
}

HSScan fit_scan(const std::vector<Interval>& windows, const std::vector<double>& values) {
    HSScan sc;
    sc.windows = windows;
    sc.hs_values = values;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        sc.widths.push_back(windows[i].width());
        sc.constants.push_back(values[i] / std::sqrt(windows[i].width()));
    }
    const PowerFit f = fit_power_law(sc.widths, sc.hs_values);
    sc.fit_exponent = f.exponent;
    sc.fit_constant = f.constant;
    sc.fit_residual = f.residual;
    return sc;
}

HSScan hs_scan(const DiracMatrix& H, const std::vector<Interval>& windows, const HSOptions& opt) {
    if (windows.size() < 2) throw DomainError("hs scan needs at least two windows");
    const TridiagSolver S(H, opt.z);
    std::vector<double> vals;
    for (const auto& w : windows) vals.push_back(hs_window(H, S, w, opt));
    return fit_scan(windows, vals);
}

std::vector<Interval> centered_windows(const std::vector<double>& widths) {
    std::vector<Interval> w;
    for (double L : widths) w.push_back({-0.5 * L, 0.5 * L});
    return w;
}

std::vector<Interval> anchored_windows(const std::vector<double>& widths, double delta_min) {
    std::vector<Interval> w;
    for (double L : widths) w.push_back({delta_min, delta_min + L});
    return w;
}

double free_line_hs(double width) { return std::sqrt(width); }

double free_halfline_hs_squared(const Interval& w) {
    if (w.lo < 0.0) throw DomainError("half-line window must lie in [0, inf)");
    return w.width();
}

KernelCheck kernel_check(double dx, double length, const std::vector<double>& columns,
                         double row_limit) {
    const Grid g = make_halfline_grid(length, dx);
    auto zero = [](double) { return 0.0; };
    const DiracMatrix H = assemble_halfline(g, zero, zero, 0.0, 0.0, 0.0);
    const TridiagSolver S(H, I);
    KernelCheck kc;
    kc.dx = dx;
    const int N = H.size();
    for (double x2t : columns) {
        // both components: the psi2 site at the node nearest x2 and its psi1 partner
        int j = static_cast<int>(std::lround(x2t / dx - 0.5));
        j = std::clamp(j, 0, g.n - 1);
        for (int m2 : {2 * j, 2 * j + 1}) {
            Eigen::VectorXcd e = Eigen::VectorXcd::Zero(N);
            e(m2) = 1.0;
            const Eigen::VectorXcd col = S.solve(e) / dx;
            const double x2 = g.site_pos(m2);
            const int b = Grid::component(m2) - 1;
            for (int m1 = 0; m1 < N; ++m1) {
                const double x1 = g.site_pos(m1);
                if (m1 == m2 || x1 > row_limit) continue;
                const int a = Grid::component(m1) - 1;
                const cplx ref = free_halfline_kernel(x1, x2)(a, b);
                kc.max_error = std::max(kc.max_error, std::abs(col(m1) - ref));
                kc.max_kernel = std::max(kc.max_kernel, std::abs(ref));
            }
        }
    }
    return kc;
}

}  // namespace dirac
