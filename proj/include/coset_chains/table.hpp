#pragma once
// Contingency tables with fixed margins: validation, exhaustive enumeration,
// the Fisher-Yates distribution with its exact moments, the bijection with
// double cosets of permutations, majorization, the theta-deformed coset
// weight, three-way tables, and file IO.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "coset_chains/partition.hpp"
#include "coset_chains/rational.hpp"
#include "coset_chains/rng.hpp"

namespace coset_chains {

// Margins are positive integer vectors. They need not be sorted; only the
// spectral layer requires partition order and sorts its own copies.
using Margins = std::vector<int>;

// Row-major rectangular matrix of non-negative counts.
using Table = std::vector<std::vector<int>>;

// Three-dimensional array of counts, indexed [i][j][k].
using Table3 = std::vector<std::vector<std::vector<int>>>;

// One-line notation: perm[k] is the image of k+1, values 1..n.
using Permutation = std::vector<int>;

// Throw std::invalid_argument unless every entry is >= 1 and the vector is
// nonempty.  `what` names the offending argument in the message.
void require_margins(const Margins& m, const char* what);

// Throw std::invalid_argument unless T is rectangular with non-negative
// entries, row sums `rows` and column sums `cols`.
void require_table(const Table& T, const Margins& rows, const Margins& cols);

Margins row_margins(const Table& T);
Margins col_margins(const Table& T);

// Enumeration cap: default 2,000,000 states, overridable via the environment
// variable COSET_CHAINS_MAX_STATES.
std::size_t max_enumeration_states();

// All tables with the given margins, in decreasing lexicographic order of the
// row-major entry vector.  Throws std::runtime_error("state space too large")
// once the cap is hit.
std::vector<Table> enumerate_tables(const Margins& rows, const Margins& cols);

// pi(T) = (1/n!) prod_i rows_i! prod_j cols_j! / prod_ij T_ij!, the
// probability of T under independent sampling conditioned on the margins.
Rat fisher_yates_pmf(const Table& T, const Margins& rows, const Margins& cols);

// n! * fisher_yates_pmf(T): the number of permutations mapping to T.
Int coset_size(const Table& T, const Margins& rows, const Margins& cols);

// T_ij = #{positions k in row-block i : sigma(k) lies in value-block j},
// where `rows` cuts positions 1..n into consecutive blocks and `cols` cuts
// values 1..n likewise.
Table permutation_to_table(const Permutation& sigma, const Margins& rows,
                           const Margins& cols);

// The minimal-length permutation mapping to T: scan blocks left to right and
// hand each row block the smallest unused values, column block by column
// block.  Round-trips through permutation_to_table.
Permutation min_coset_representative(const Table& T, const Margins& rows,
                                     const Margins& cols);

// Exact sampling: uniform shuffle of 1..n, then permutation_to_table.
Table sample_fisher_yates(const Margins& rows, const Margins& cols,
                          SplitMix64& rng);

// E[T_ij] = rows_i * cols_j / n.
Rat expected_entry(const Margins& rows, const Margins& cols, int i, int j);

// E[T_ij T_kl], exact in all index cases:
//   delta_ik delta_jl r_i c_j / n
//   + (r_i r_k - delta_ik r_i)(c_j c_l - delta_jl c_j) / (n(n-1)).
Rat cross_moment(const Margins& rows, const Margins& cols, int i, int j,
                 int k, int l);

// chi^2(T) = sum_ij (T_ij - r_i c_j/n)^2 / (r_i c_j/n), margins read off T.
Rat chi_square_statistic(const Table& T);

// True iff the sorted entries of b majorize the sorted entries of a
// (a is "flatter"); requires equal margins.
bool table_majorizes(const Table& a, const Table& b);

// [m]_theta! = prod_{t=1}^{m} (1 + theta + ... + theta^{t-1}).
Rat theta_factorial(int m, const Rat& theta);

// theta^{-n^2 + sum_{i<i', j<j'} T_ij T_i'j'} (1-theta)^n
//   * prod [r_i]_theta! prod [c_j]_theta! / prod [T_ij]_theta!.
// Dividing by (1-theta)^n and letting theta -> 1 recovers coset_size(T).
// Throws std::domain_error unless 0 < theta <= 1.
Rat q_coset_weight(const Table& T, const Rat& theta);

// ---------------------------------------------------------------- file IO ---

// JSON object {"rows": [[ints]], "row_sums": [...], "col_sums": [...]}; the
// sum fields are optional on input and verified when present.
Table table_from_json(const std::string& text);
std::string table_to_json(const Table& T);

// Plain comma-separated matrix; margins are inferred.
Table table_from_csv(const std::string& text);
std::string table_to_csv(const Table& T);

// Dispatch on extension: .json or .csv.  Throws std::runtime_error on
// unreadable files or unknown extensions.
Table load_table_file(const std::string& path);

// --------------------------------------------------------- three-way tables ---

// One-dimensional margin along `axis` (0, 1 or 2): sums over the other two
// indices.
Margins axis_margins(const Table3& T, int axis);

void require_table3(const Table3& T, const Margins& a, const Margins& b,
                    const Margins& c);

// prod_ijk T_ijk!; the stationary law of the three-way chain is
// proportional to 1 / this product.
Int factorial_product3(const Table3& T);

// The set of three-way tables with the given one-dimensional margins, packed
// four bits per cell (entries must stay below 16, i.e. n <= 15).  States are
// held in decreasing lexicographic order of the row-major cell vector.
class Table3Space {
 public:
  // Enumerates on construction; the cap of max_enumeration_states() applies.
  Table3Space(Margins a, Margins b, Margins c);

  std::size_t size() const { return count_; }
  const Margins& margins(int axis) const;
  Table3 table(std::size_t idx) const;
  // Binary search; throws std::out_of_range when absent.
  std::size_t index_of(const Table3& T) const;

 private:
  Margins a_, b_, c_;
  std::size_t cells_ = 0;    // a.size()*b.size()*c.size()
  std::size_t stride_ = 0;   // bytes per packed state
  std::size_t count_ = 0;
  std::vector<std::uint8_t> packed_;

  void pack_into(const Table3& T, std::uint8_t* out) const;
};

// Convenience for small spaces: unpack the whole of Table3Space.
std::vector<Table3> enumerate_tables3(const Margins& a, const Margins& b,
                                      const Margins& c);

}  // namespace coset_chains
