#pragma once
// Convergence measurement for the table kernels: exact distribution
// evolution, total-variation and chi-square distances, closed-form upper and
// lower mixing bounds (averaged, extreme-state, and Wilson-style), spectral
// gaps with the Metropolis relaxation-time comparison, and Monte Carlo
// estimates beyond enumerable scale.

#include <array>
#include <cstddef>
#include <vector>

#include "coset_chains/chains.hpp"
#include "coset_chains/rational.hpp"
#include "coset_chains/rng.hpp"
#include "coset_chains/table.hpp"

namespace coset_chains {

// start * P^t by sparse row multiplication, exact.  `start` is indexed like
// kernel.states() and must have matching length; t >= 0.
std::vector<Rat> evolve_distribution(const ChainKernel& kernel,
                                     const std::vector<Rat>& start,
                                     long long t);

// Same in double precision, for horizons where exact denominators blow up.
std::vector<double> evolve_distribution(const ChainKernel& kernel,
                                        const std::vector<double>& start,
                                        long long t);

// ||p - q||_TV = (1/2) sum |p_y - q_y|; the lengths must agree.
Rat tv_distance(const std::vector<Rat>& p, const std::vector<Rat>& q);
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

// chi^2_x0(t) = sum_y (P^t(x0,y) - pi_y)^2 / pi_y, exact.
Rat chi2_distance(const ChainKernel& kernel, std::size_t x0, long long t);

// sum_x pi_x chi^2_x(t), exact.  Equals the spectrum sum
// sum_{rho != (n)} m_rho beta_rho^{2t} (first power of the multiplicity).
Rat avg_chi2_exact(const ChainKernel& kernel, long long t);

// The two-row specialization of that sum: margins (n-k,k) x (n-l,l) with
// k <= l give multiplicity one for each beta_m, so the average is
// sum_{m=1}^{k} beta_m^{2t}.
Rat avg_chi2_sum_form(long long k, long long n, long long t);

// Smallest t with max_x tv(P^t(x,.), pi) < eps, by doubling plus integer
// bisection with exact probes (TV from stationarity never increases in t).
// eps must lie in (0,1); a single-state space mixes at t = 0.
long long mixing_time(const ChainKernel& kernel, const Rat& eps = Rat(1, 4));

// One plot row: distances from the start state after t steps.  `bound` is
// the total-variation bound sqrt(chi2)/2 implied by 4 tv^2 <= chi2.
struct DistanceProfile {
    long long t = 0;
    double tv = 0.0;
    double chi2 = 0.0;
    double bound = 0.0;
};

// Profile rows for t = 0..t_max.  Steps up to `exact_step_budget` run in
// exact rationals; later steps continue the same trajectory in doubles.
// `exact_until` records the last exact step (-1 when the space exceeds
// `exact_state_budget` and everything ran in doubles).
struct MixProfile {
    std::vector<DistanceProfile> rows;
    long long exact_until = -1;
};

MixProfile mix_profile(const ChainKernel& kernel, std::size_t x0,
                       long long t_max, long long exact_step_budget = 64,
                       std::size_t exact_state_budget = 4096);

// ------------------------------------------------------- closed-form bounds ---

enum class BoundSide { Upper, Lower };

// A prescribed time with the value guaranteed at it.
struct PrescribedBound {
    double t = 0.0;
    double bound = 0.0;
};

// Averaged chi-square bounds for margins (n-k,k) x (n-l,l), 1 <= k <= l <= n/2:
//   Upper: t = (n/4)(log k + c)  gives  sum_x pi_x chi^2_x(t) <= e^{-c},
//   Lower: t = c n/4             gives  the same average >= 1 - c.
// c must be positive for Upper and non-negative for Lower.
PrescribedBound avg_chi2_bound(long long k, long long l, long long n, double c,
                               BoundSide side);

// Times bracketing the chi-square decay from the extreme state k e_j (the
// table with row margins (n-k,k) whose second row is k in column j):
//   chi^2(t_upper) <= e^{-c}   and   chi^2(t_lower) >= e^{c}.
struct ExtremeStateBounds {
    double t_upper = 0.0;
    double t_lower = 0.0;
};

// Requires 1 <= k, n > 2k and mu_j > k (otherwise the extreme state does not
// exist); c > 0.  j is a 0-based index into mu.
ExtremeStateBounds extreme_state_bounds(long long k, const Margins& mu,
                                        std::size_t j, double c);

// Exact chi^2 from the extreme state k e_j after t steps, by the kernel
// polynomial sum  sum_{m=1}^{k} beta_m^{2t} h_m(k e_j, k e_j).
Rat extreme_chi2(long long k, const Margins& mu, std::size_t j, long long t);

// Wilson-style lower bound on the 1/4-mixing time from the linear
// eigenfunction at cell (i,j), in the form (n/4 - 1/2)(log(arg) - c) with
//   case 1 (n >= 2(lambda_i + mu_j)):  arg = m_ij - lambda_i mu_j / n,
//   case 2 (otherwise):  arg = (n m_ij - lambda_i mu_j)^2 / (2 n(n+2) lambda_i mu_j),
// where m_ij = min(lambda_i, mu_j).  A log argument <= 1 (or a non-positive
// time) degenerates to the trivial bound 0.
struct WilsonBound {
    double t_lower = 0.0;
    double argument = 0.0;    // the value inside the log
    int case_fired = 0;       // 1 or 2
    bool degenerate = false;  // clamped to 0
};

WilsonBound wilson_lower_bound(const Margins& lambda, const Margins& mu,
                               std::size_t i, std::size_t j, double c);

// ------------------------------------------- gaps and relaxation comparison ---

// 1 - (second largest eigenvalue), from the dense eigensolver; a single-state
// space reports 1 by convention.
double spectral_gap(const ChainKernel& kernel);

// Spectrum summary of one kernel.  The relaxation time is 1 over the
// absolute gap 1 - max(|eigenvalue| below the top).
struct ChainRelaxation {
    KernelKind kind = KernelKind::RandomTranspositions;
    double second_eigenvalue = 0.0;
    double min_eigenvalue = 0.0;
    double gap = 0.0;
    double abs_gap = 0.0;
    double relaxation = 0.0;
};

// Relaxation times of the transposition chain, the uniform swap chain, and
// the two Metropolis hybrids, with the comparison inequalities
//   (m^2 (IJ)^2 / n^2) tau_UM <= tau_U  <= (M^2 (IJ)^2 / n^2) tau_UM
//   (n^2 / ((IJ)^2 M^4)) tau_FYM <= tau_FY <= (n^2 / ((IJ)^2 m^4)) tau_FYM
// where m / M are the smallest positive and largest entry over all tables.
// On a single-state space the comparison is skipped and the flags stay true.
struct RelaxationReport {
    std::size_t states = 0;
    std::size_t n_rows = 0, n_cols = 0;
    long long total = 0;
    long long min_positive_entry = 0;
    long long max_entry = 0;
    bool single_state = false;
    // order: RandomTranspositions, UniformSwap, MetropolisUniform,
    // MetropolisFisherYates
    std::array<ChainRelaxation, 4> chains{};
    double uniform_lower = 0.0, uniform_upper = 0.0;
    double fy_lower = 0.0, fy_upper = 0.0;
    bool uniform_ok = true, fy_ok = true;
};

RelaxationReport relaxation_comparison(const Margins& lambda, const Margins& mu);

// ------------------------------------------------------------- Monte Carlo ---

// Plug-in TV estimate against the exact stationary law from `paths`
// simulated trajectories of length t, with a bootstrap percentile interval
// (multinomial resampling of the visit counts).
struct EmpiricalTv {
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

EmpiricalTv empirical_tv(const ChainKernel& kernel, std::size_t x0, long long t,
                         long long paths, SplitMix64& rng,
                         int bootstrap_rounds = 200);

}  // namespace coset_chains
