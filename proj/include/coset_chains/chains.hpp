#pragma once
// Markov kernels on contingency tables: random transpositions (with retention
// or retention-free), the permutation-level chain it lumps from, the uniform
// swap chain, both Metropolis hybrids, the 2x2 collapse, and the three-way
// chain.  Rows are exact rational and keyed by table value; ChainKernel wraps
// them over an enumerated state space.

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "coset_chains/rational.hpp"
#include "coset_chains/rng.hpp"
#include "coset_chains/table.hpp"

namespace coset_chains {

// One kernel row: transitions to *other* states plus the retained mass.
// Moves carry exact probabilities, sum(moves) + holding == 1.
struct TableRow {
    std::vector<std::pair<Table, Rat>> moves;
    Rat holding;
};

struct Table3Row {
    std::vector<std::pair<Table3, Rat>> moves;
    Rat holding;
};

// Random transpositions: pick two of the n items uniformly and independently
// and swap their column coordinates.  Each unordered 2x2 minor with pivots
// (i1,j1),(i2,j2) and both pivots positive moves with probability
// 2 T_{i1j1} T_{i2j2} / n^2; distinct minor orientations land on distinct
// tables, so no aggregation is needed.  With `no_holding` the two picks are
// forced distinct, rescaling move weights to 2 T T / (n(n-1)).
TableRow rt_row(const Table& T, bool no_holding = false);

// One step of the same walk without materializing the row: two independent
// item picks proportional to the entries, then the column swap.
Table rt_sample_step(const Table& T, SplitMix64& rng);

// Permutation-level step: choose positions a, b uniformly and independently
// and exchange the values at those positions (a == b retains sigma).
Permutation sn_rt_step(const Permutation& sigma, SplitMix64& rng);

// Uniform proposal: an ordered pair of cells is drawn uniformly (probability
// 2/(IJ)^2 per unordered pair and orientation); proposals that would drive an
// entry negative are rejected in place.  Symmetric, so uniform-stationary.
TableRow uniform_swap_row(const Table& T);

// Random-transpositions proposal accepted toward the uniform law:
// min(P_rt(x,y), P_rt(y,x)) = min(2 x_a x_b, 2 (x_c+1)(x_d+1)) / n^2.
TableRow metropolis_uniform_row(const Table& T);

// Uniform proposal accepted toward Fisher-Yates:
// (2/(IJ)^2) min(1, x_a x_b / ((x_c+1)(x_d+1))); zero-pivot proposals are
// rejected outright.
TableRow metropolis_fy_row(const Table& T);

// Three-way chain: pick two of the n items uniformly and independently, pick
// an axis r uniformly, and swap the r-coordinates of the two items.  Each
// unordered pair of cells and axis contributes (1/3) 2 T_c1 T_c2 / n^2; moves
// that reproduce T (equal r-coordinates, or cells differing only along r)
// fold into the retained mass.  Distinct (pair, axis) choices can land on the
// same table, so probabilities aggregate.
Table3Row three_way_row(const Table3& T);

// Collapse rows 2..I and columns 2..J into one cell each:
//   [[T11, l1 - T11], [m1 - T11, n - l1 - m1 + T11]]
// with margins (l1, n-l1), (m1, n-m1).  Throws std::invalid_argument unless
// I >= 2 and J >= 2.
Table collapse_to_2x2(const Table& T);

enum class KernelKind {
    RandomTranspositions,
    RandomTranspositionsNoHolding,
    UniformSwap,
    MetropolisUniform,
    MetropolisFisherYates,
};

const char* kernel_name(KernelKind kind);
KernelKind kernel_by_name(const std::string& name);  // throws on unknown

// A kernel over the full enumerated table space with the given margins.
// Rows are computed on demand and returned as (state index, probability)
// pairs including the self-loop.
class ChainKernel {
 public:
    ChainKernel(KernelKind kind, Margins rows, Margins cols);

    KernelKind kind() const { return kind_; }
    const Margins& row_margins() const { return rows_; }
    const Margins& col_margins() const { return cols_; }
    const std::vector<Table>& states() const { return states_; }
    std::size_t size() const { return states_.size(); }
    std::size_t index_of(const Table& T) const;  // throws when absent

    std::vector<std::pair<std::size_t, Rat>> row(std::size_t state) const;

    // The exact stationary law: Fisher-Yates for the transposition kernels
    // and the Fisher-Yates Metropolis hybrid, uniform for the others.
    std::vector<Rat> stationary() const;

 private:
    KernelKind kind_;
    Margins rows_, cols_;
    std::vector<Table> states_;
    std::map<Table, std::size_t> index_;
    TableRow table_row(const Table& T) const;
};

}  // namespace coset_chains
