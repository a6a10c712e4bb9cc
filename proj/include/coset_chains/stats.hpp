#pragma once
// Residual analysis for observed contingency tables under the
// margin-conditioned (Fisher-Yates) null: Pearson and unit-variance
// residuals, an exact split of the chi-square statistic along the chain's
// polynomial eigenfunctions, normalized quadratic residual panels, a
// chi-square tail function, and three bundled classical datasets.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "coset_chains/rational.hpp"
#include "coset_chains/table.hpp"

namespace coset_chains {

// An observed table bundled with its margins and a short provenance note.
struct Dataset {
    std::string name;
    Table table;
    Margins rows;
    Margins cols;
    long long total = 0;
    std::string note;
};

// Names accepted by builtin_dataset(): "midtown", "victoria", "hair_eye".
const std::vector<std::string>& builtin_dataset_names();

// The named classical dataset, margins recomputed from the entries.  Throws
// std::invalid_argument on an unknown name.
Dataset builtin_dataset(const std::string& name);

// Pearson residuals (T_ij - r_i c_j / n) / sqrt(r_i c_j / n).  Requires all
// margins positive (every expected count nonzero).
std::vector<std::vector<double>> pearson_residuals(const Table& T);

// Residuals scaled by the exact Fisher-Yates standard deviation instead of
// the Poisson one: (T_ij - r_i c_j / n) / sqrt(c_ij) with
//   c_ij = r_i c_j (n - r_i)(n - c_j) / (n^2 (n - 1)),
// so each entry has variance exactly 1 under the null.  Requires n >= 2 and
// every c_ij > 0, i.e. no margin equal to 0 or n.
std::vector<std::vector<double>> normalized_residuals(const Table& T);

// Upper tail P(X >= stat) of the chi-square distribution with df degrees of
// freedom: the regularized incomplete gamma Q(df/2, stat/2), evaluated by
// the lower series for stat < df + 2 and by a continued fraction otherwise
// (good to roughly 1e-12 relative accuracy).  stat <= 0 gives 1.
double chi_square_pvalue(double stat, long long df);

// The chi-square statistic split along the eigenfunction hierarchy.  With
// K_ij = (2 r_i c_j - 2 r_i - 2 c_j + n) / (n - 2),
// L_ij = r_i c_j (1 + r_i c_j - r_i - c_j) / ((n - 1)(n - 2)),
// M_ij = r_i c_j / n, each cell's squared deviation splits exactly as
//   (x - M)^2 = (x^2 - K x + L) + (K - 2M)(x - M) + (K M - M^2 - L),
// where the first bracket is the diagonal quadratic eigenfunction and the
// second is a multiple of the linear one.  Dividing by M and summing gives
// chi^2 = quadratic + linear + constant with
//   constant = sum_ij (n - r_i)(n - c_j) / (n (n - 1))
//            = n (I - 1)(J - 1) / (n - 1).
// Each piece has an exact stationary interpretation: the linear and
// quadratic parts have mean zero under Fisher-Yates, so the constant is
// E_pi[chi^2].  Requires n >= 3 and positive margins.
struct Chi2Decomposition {
    Rat quadratic;
    Rat linear;
    Rat constant;
};
Chi2Decomposition chi2_decomposition(const Table& T);

// One entry of the quadratic residual panel: the quadratic eigenfunction
// attached to the unordered cell pair (i,j),(k,l), evaluated at the observed
// table and normalized to unit stationary variance.  When the table space
// is small the variance is an exact pi-weighted sum over all tables;
// otherwise it is estimated from Fisher-Yates samples and the normal-theory
// confidence interval for the variance is reported.  A zero variance (the
// eigenfunction vanishes pi-almost surely) gives value 0.
struct PanelEntry {
    std::size_t i = 0, j = 0, k = 0, l = 0;
    double value = 0.0;
    double variance = 0.0;
    bool exact_variance = false;
    double variance_ci_low = 0.0;
    double variance_ci_high = 0.0;
};

struct PanelOptions {
    // Enumerate the table space exactly when a cheap stars-and-bars bound on
    // its size stays under this cap; otherwise fall back to sampling.
    std::size_t enumeration_cap = 20000;
    long long samples = 20000;  // Fisher-Yates draws on the sampled route
    std::uint64_t seed = 1;
};

// All I*J*(I*J + 1)/2 unordered cell pairs (diagonal included), in row-major
// order of (i,j) then (k,l).  Deterministic for a fixed seed.
std::vector<PanelEntry> quadratic_residual_panel(const Table& T,
                                                 const PanelOptions& options = {});

}  // namespace coset_chains
