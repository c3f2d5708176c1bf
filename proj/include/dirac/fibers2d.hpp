#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dirac/dynamics.hpp"
#include "dirac/lattice.hpp"

namespace dirac {

// 2D spinor on (chain of x1) x (periodic x2). values(m, j) holds the chain
// site m at x2_j = -L2/2 + j dx2, L2 = n2 dx2.
struct TranslationField {
    Grid grid;
    int n2 = 0;
    double dx2 = 0.0;
    Eigen::MatrixXcd values;

    double period() const { return n2 * dx2; }
    double x2(int j) const { return -0.5 * period() + j * dx2; }
    double norm_squared() const;
};

// 2D spinor on a polar grid. upper(j, q) sits at radius site_pos(2j+1) and
// lower(j, q) at site_pos(2j) of a half-line grid, angle phi_q = 2 pi q / Q.
struct PolarField {
    Grid grid;
    int Q = 0;
    Eigen::MatrixXcd upper, lower;

    double angle(int q) const;
    double norm_squared() const;  // int |psi|^2 r dr dphi
};

enum class FiberKind { Translation, Rotation };
std::string to_string(FiberKind k);

struct FiberFamily {
    FiberKind kind = FiberKind::Translation;
    std::vector<double> labels;      // xi values or channels k
    std::vector<WavePacket> states;  // one chain state per label
    std::vector<double> weights;     // ||state||^2
    double total = 0.0;              // ||psi_2D||^2
    // reconstruction metadata
    int n2 = 0;
    double dx2 = 0.0;
    int Q = 0;

    double weight_sum() const;
    int size() const { return static_cast<int>(labels.size()); }
};

// Unitary DFT along x2; fiber at xi_q = 2 pi q / L2, labels ascending.
FiberFamily fiber_translation(const TranslationField& f);
TranslationField inverse_translation(const FiberFamily& fam);
// xi values of the dual grid for n2 points and spacing dx2, ascending.
std::vector<double> dual_grid(int n2, double dx2);

// Channel k pairs the harmonic e^{i(k-1/2)phi} of the upper component with
// e^{i(k+1/2)phi} of the lower one; the chain amplitude is sqrt(2 pi r)
// times the harmonic coefficient.
FiberFamily fiber_rotation(const PolarField& f, const std::vector<double>& channels);
PolarField inverse_rotation(const FiberFamily& fam);

// Full 2D translation-invariant operator on the chain x periodic x2 grid with
// -i d/dx2 acting spectrally. Dense; for structural checks at small sizes.
Eigen::MatrixXcd assemble_translation_2d(const Grid& grid, const Field& V, const Field& A, int n2,
                                         double dx2, double m = 0.0);
// 1_delta(H) applied to a translation field through a dense eigendecomposition.
TranslationField filter_translation_2d(const Eigen::MatrixXcd& H2d, const Interval& delta,
                                       const TranslationField& f);
// dx1 dx2 sum |x1|^p |psi|^2
double translation_moment_2d(const TranslationField& f, double p);

struct AggregateReport {
    double p = 0.0;
    std::vector<int> selected;
    double selected_weight = 0.0;
    double total_weight = 0.0;
    std::vector<double> T_values;
    std::vector<double> bound_values;   // sum over selected labels
    std::vector<double> moment_values;  // sum over all labels = 2D Cesaro moment
    double fitted_exponent = 0.0;       // of moment_values
    double bound_exponent = 0.0;
    double min_fiber_exponent = 0.0;
    double constant = 0.0;  // sum of selected fiber constants
    bool dominates = true;  // moment >= bound at every T
};

// Labels by decreasing weight until at least `fraction` of the total is covered.
std::vector<int> select_labels(const FiberFamily& fam, double fraction = 0.5);

// reports[i] belongs to fam.labels[i]; a missing report is allowed only for a
// label of negligible weight. All reports must share one T grid.
AggregateReport aggregate_lower_bound(const FiberFamily& fam,
                                      const std::vector<std::optional<BallisticReport>>& reports,
                                      double p, const std::vector<int>& selected);

}  // namespace dirac
