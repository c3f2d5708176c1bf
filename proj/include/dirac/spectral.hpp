#pragma once

#include <string>
#include <vector>

#include "dirac/dynamics.hpp"
#include "dirac/lattice.hpp"

namespace dirac {

struct SpectralMeasure {
    std::vector<double> edges;   // sorted, size = bins + 1
    std::vector<double> masses;  // mass per bin
    double total = 0.0;

    int bins() const { return static_cast<int>(masses.size()); }
    double width(int i) const { return edges[i + 1] - edges[i]; }
    double density(int i) const { return masses[i] / width(i); }
    int bin_of(double e) const;  // -1 when outside
};

// mu(bin) = dx * sum_{lambda in bin} |<v_lambda, psi>|^2. Every eigenvalue
// carrying weight must fall into a bin.
SpectralMeasure spectral_measure(const EigenSystem& es, const WavePacket& psi,
                                 const std::vector<double>& edges);

// Equal bins over delta, width = gap_multiple * mean eigenvalue gap inside delta.
std::vector<double> default_bins(const EigenSystem& es, const Interval& delta, double gap_multiple = 4.0);

struct LipschitzCertificate {
    bool ok = false;
    double alpha = 0.0;       // density level separating mu1 and mu2
    double mean_density = 0.0;  // total / span of the bins
    double mu1_total = 0.0;
    double mu2_total = 0.0;
    double total = 0.0;
    std::string note;
};

struct LipschitzSplit {
    SpectralMeasure mu1, mu2;
    LipschitzCertificate cert;
};

// mu1 keeps the bins with density <= alpha; any union U of those bins obeys
// mu1(U) <= alpha |U| at bin resolution.
LipschitzSplit lipschitz_split(const SpectralMeasure& mu, double alpha);

// Smallest tested level alpha achieving mu2 < total/4. Levels are geometric
// multiples of the mean density over the binned range, capped at
// cap_factor times that mean; a point-like measure cannot meet the bound
// under the cap and is reported as a failed certificate.
LipschitzSplit lipschitz_split_auto(const SpectralMeasure& mu, double cap_factor = 4.0,
                                    int levels_per_octave = 8);

// Component of psi carried by the eigenvalues in the mu1 bins.
WavePacket lipschitz_component(const EigenSystem& es, const WavePacket& psi, const LipschitzSplit& split);

struct ProxyOptions {
    double taper = 0.0;     // fraction of delta's half-width over which a cos^2 filter rolls off
    int min_eigenvalues = 20;
    double gap_multiple = 4.0;
    double cap_factor = 4.0;
};

struct ProxyState {
    WavePacket psi;
    SpectralMeasure measure;
    LipschitzSplit split;
    double kept_fraction = 0.0;  // ||P envelope||^2 / ||envelope||^2
};

// Projects an envelope onto the eigenvectors with eigenvalue in delta (with
// an optional smooth roll-off), normalizes and certifies the result.
ProxyState ac_proxy_state(const EigenSystem& es, const Interval& delta, const Envelope& env,
                          const ProxyOptions& opt = {});
ProxyState ac_proxy_state(const EigenSystem& es, const Interval& delta, const WavePacket& envelope,
                          const ProxyOptions& opt = {});

}  // namespace dirac
