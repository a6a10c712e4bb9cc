#pragma once
// Spectrum of the transposition chain in closed form (partition-indexed
// eigenvalues with Kostka multiplicities), Hahn orthogonal polynomials in one
// and several variables, kernel polynomials at extreme states, and a dense
// symmetric eigensolver serving as a numerical oracle.

#include <cstddef>
#include <vector>

#include "coset_chains/chains.hpp"
#include "coset_chains/partition.hpp"
#include "coset_chains/rational.hpp"
#include "coset_chains/table.hpp"

namespace coset_chains {

// beta_rho = 1/n + (1/n^2) sum_j [rho_j^2 - (2j-1) rho_j]  (1-based j).
Rat beta(const Partition& rho, long n);

// beta_m = 1 - 2m(n+1-m)/n^2, the two-row value beta((n-m, m), n).
Rat beta_two_row(long m, long n);

struct SpectrumEntry {
    Partition rho;
    Rat value;                 // beta_rho
    long long multiplicity;    // kostka(rho, lambda) * kostka(rho, mu)
};
using Spectrum = std::vector<SpectrumEntry>;

// All partitions of n with positive multiplicity, in decreasing lexicographic
// order of rho (so the eigenvalue 1 comes first).  Unsorted margin vectors
// are accepted; the spectrum only depends on them through their sorted copies.
Spectrum spectrum(const Margins& lambda, const Margins& mu);

// Numerical oracle: symmetrize the kernel by the stationary law and run
// cyclic Jacobi rotations (off-diagonal Frobenius norm below 1e-12, at most
// 100 sweeps).  Exact detailed balance is checked first; a non-reversible
// kernel or a space beyond 2000 states throws std::runtime_error.  Returns
// all eigenvalues, sorted descending.
std::vector<double> brute_force_spectrum(const ChainKernel& kernel);

// Q_m(x; k, a, b) = sum_s (-m)_(s) (m+a+b-1)_(s) (-x)_(s) / ((a)_(s) (-k)_(s) s!),
// the terminating hypergeometric sum.  Throws std::domain_error when a
// denominator factor vanishes before the numerator terminates.
Rat hahn_univariate(long m, long x, long k, const Rat& a, const Rat& b);

// Multivariate Hahn polynomial on the slice {x : sum x_j = k, 0 <= x_j <= mu_j}:
//   Q_m(x; k, mu) = ((-1)^{|m|} / k_[|m|]) prod_{j=1}^{J-1} factor_j,
// where factor_j is the univariate sum in x_j with parameters
//   size  k - (x_1 + ... + x_{j-1}) - (m_{j+1} + ... + m_{J-1}),
//   a_j = -mu_j,   b_j = 2(m_{j+1}+...+m_{J-1}) - (mu_{j+1}+...+mu_J),
// with the size-parameter Pochhammer folded into the sum so that short
// remaining budgets stay finite.  m has length J-1; |m| > k throws
// std::domain_error (vanishing k_[|m|]).
Rat hahn_multivariate(const std::vector<int>& m, const std::vector<int>& x,
                      long k, const Margins& mu);

// H_{k,mu}(x) = prod_j C(mu_j, x_j) / C(n, k) on the same slice.
Rat hypergeometric_weight(const std::vector<int>& x, long k, const Margins& mu);

// All slice points {x : sum x_j = k, 0 <= x_j <= mu_j}, decreasing
// lexicographic.
std::vector<std::vector<int>> slice_states(long k, const Margins& mu);

// h_m(k e_j, k e_j) = C(k,m) (n-2m+1) n_[m-1] (n-mu_j)_[m] / ((n-k)_[m] (mu_j)_[m]),
// the degree-m kernel polynomial at the extreme slice point.  Requires
// 1 <= m <= k and mu_j >= k.
Rat kernel_poly_extreme(long m, long k, long mu_j, long n);

}  // namespace coset_chains
