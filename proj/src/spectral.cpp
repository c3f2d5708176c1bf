#include "dirac/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dirac {

int SpectralMeasure::bin_of(double e) const {
    if (edges.size() < 2 || e < edges.front() || e > edges.back()) return -1;
    if (e == edges.back()) return bins() - 1;
    const auto it = std::upper_bound(edges.begin(), edges.end(), e);
    return static_cast<int>(it - edges.begin()) - 1;
}

SpectralMeasure spectral_measure(const EigenSystem& es, const WavePacket& psi,
                                 const std::vector<double>& edges) {
    if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()))
        throw DomainError("bin edges must be sorted with at least one bin");
    SpectralMeasure mu;
    mu.edges = edges;
    mu.masses.assign(edges.size() - 1, 0.0);
    const double dx = psi.grid.dx;
    const double norm2 = psi.recompute_norm() * psi.recompute_norm();
    const Eigen::VectorXcd c = es.coefficients(psi.amplitudes);
    double captured = 0.0, leftover = 0.0;
    for (int k = 0; k < c.size(); ++k) {
        const double w = dx * std::norm(c(k));
        captured += w;
        const int b = mu.bin_of(es.values(k));
        if (b < 0)
            leftover += w;
        else
            mu.masses[b] += w;
    }
    const double tol = 1e-10 * std::max(norm2, 1e-300);
    if (leftover > tol)
        throw DomainError("bins do not cover the spectrum: leftover mass " + std::to_string(leftover));
    if (norm2 - captured > tol)
        throw DomainError("state is not spanned by the eigensystem: missing mass " +
                          std::to_string(norm2 - captured));
    for (double m : mu.masses) mu.total += m;
    return mu;
}

std::vector<double> default_bins(const EigenSystem& es, const Interval& delta, double gap_multiple) {
    const std::vector<int> idx = es.indices_in(delta);
    if (idx.size() < 2) throw DomainError("fewer than two eigenvalues in the window");
    const double gap = (es.values(idx.back()) - es.values(idx.front())) / (idx.size() - 1);
    const double target = gap_multiple * gap;
    const int nb = std::max(1, static_cast<int>(std::ceil(delta.width() / target - 1e-9)));
    std::vector<double> edges(nb + 1);
    for (int i = 0; i <= nb; ++i) edges[i] = delta.lo + delta.width() * i / nb;
    edges.back() = delta.hi;
    return edges;
}

LipschitzSplit lipschitz_split(const SpectralMeasure& mu, double alpha) {
    if (!(alpha >= 0.0)) throw DomainError("density level must be nonnegative");
    LipschitzSplit s;
    s.mu1.edges = s.mu2.edges = mu.edges;
    s.mu1.masses.assign(mu.bins(), 0.0);
    s.mu2.masses.assign(mu.bins(), 0.0);
    for (int i = 0; i < mu.bins(); ++i) {
        if (mu.density(i) <= alpha)
            s.mu1.masses[i] = mu.masses[i];
        else
            s.mu2.masses[i] = mu.masses[i];
    }
    for (int i = 0; i < mu.bins(); ++i) {
        s.mu1.total += s.mu1.masses[i];
        s.mu2.total += s.mu2.masses[i];
    }
    auto& c = s.cert;
    c.alpha = alpha;
    c.total = mu.total;
    c.mean_density = mu.total / (mu.edges.back() - mu.edges.front());
    c.mu1_total = s.mu1.total;
    c.mu2_total = s.mu2.total;
    c.ok = c.mu2_total < 0.25 * c.total;
    if (!c.ok) c.note = "remainder mass is not below a quarter of the total";
    return s;
}

LipschitzSplit lipschitz_split_auto(const SpectralMeasure& mu, double cap_factor, int levels_per_octave) {
    if (!(mu.total > 0.0)) throw DomainError("empty measure");
    if (levels_per_octave < 1 || !(cap_factor > 0.0)) throw DomainError("bad level ladder");
    const double mean = mu.total / (mu.edges.back() - mu.edges.front());
    const int top = static_cast<int>(std::floor(std::log2(cap_factor) * levels_per_octave + 1e-9));
    const int bottom = -8 * levels_per_octave;
    for (int i = bottom; i <= top; ++i) {
        const double alpha = mean * std::exp2(static_cast<double>(i) / levels_per_octave);
        LipschitzSplit s = lipschitz_split(mu, alpha);
        if (s.cert.ok) return s;
    }
    LipschitzSplit s = lipschitz_split(mu, mean * cap_factor);
    if (!s.cert.ok)
        s.cert.note = "no density level up to " + std::to_string(cap_factor) +
                      "x the mean keeps the remainder below a quarter: the measure is point-like at bin "
                      "resolution";
    return s;
}

WavePacket lipschitz_component(const EigenSystem& es, const WavePacket& psi, const LipschitzSplit& split) {
    Eigen::VectorXcd c = es.coefficients(psi.amplitudes);
    for (int k = 0; k < c.size(); ++k) {
        const int b = split.mu1.bin_of(es.values(k));
        if (b < 0 || split.mu2.masses[b] > 0.0) c(k) = 0.0;
    }
    return WavePacket(psi.grid, es.synthesize(c));
}

namespace {

double filter_weight(double e, const Interval& delta, double taper) {
    if (e < delta.lo || e > delta.hi) return 0.0;
    if (taper <= 0.0) return 1.0;
    const double h = 0.5 * delta.width(), mid = 0.5 * (delta.lo + delta.hi);
    const double flat = h * (1.0 - taper);
    const double r = std::abs(e - mid);
    if (r <= flat) return 1.0;
    const double c = std::cos(0.5 * std::numbers::pi * (r - flat) / (h * taper));
    return c * c;
}

}  // namespace

ProxyState ac_proxy_state(const EigenSystem& es, const Interval& delta, const WavePacket& envelope,
                          const ProxyOptions& opt) {
    if (opt.taper < 0.0 || opt.taper > 1.0) throw DomainError("taper must lie in [0, 1]");
    const std::vector<int> idx = es.indices_in(delta);
    if (static_cast<int>(idx.size()) < opt.min_eigenvalues)
        throw DomainError("window holds " + std::to_string(idx.size()) + " eigenvalues, need at least " +
                          std::to_string(opt.min_eigenvalues));
    Eigen::VectorXcd c = es.coefficients(envelope.amplitudes);
    for (int k = 0; k < c.size(); ++k) c(k) *= filter_weight(es.values(k), delta, opt.taper);
    WavePacket psi(envelope.grid, es.synthesize(c));
    const double env2 = envelope.recompute_norm() * envelope.recompute_norm();
    if (!(psi.norm > 0.0)) throw DomainError("envelope has no weight in the window");
    ProxyState st{psi, {}, {}, psi.norm * psi.norm / env2};
    st.psi.amplitudes /= psi.norm;
    st.psi.norm = st.psi.recompute_norm();
    st.measure = spectral_measure(es, st.psi, default_bins(es, delta, opt.gap_multiple));
    st.split = lipschitz_split_auto(st.measure, opt.cap_factor);
    return st;
}

ProxyState ac_proxy_state(const EigenSystem& es, const Interval& delta, const Envelope& env,
                          const ProxyOptions& opt) {
    return ac_proxy_state(es, delta, make_packet(es.grid, env, true), opt);
}

}  // namespace dirac
