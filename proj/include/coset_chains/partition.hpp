#pragma once

// Integer partitions, Kostka numbers (semistandard Young tableau counts) and
// the majorization order.  These are the combinatorial inputs for the
// spectral decomposition of the table chains: eigenvalues are indexed by
// partitions and multiplicities are products of Kostka numbers.

#include <vector>

namespace coset_chains {

// A partition is a weakly decreasing vector of positive integers.
using Partition = std::vector<int>;

// Sum of entries (the n the partition belongs to).
long partition_sum(const Partition& p);

// True iff parts are strictly positive and weakly decreasing.
bool is_valid_partition(const Partition& p);

// Throws std::invalid_argument when is_valid_partition fails.
void require_partition(const Partition& p, const char* what);

// All partitions of n, each exactly once, in decreasing lexicographic order:
// (n) first, (1,1,...,1) last.  n >= 1.
std::vector<Partition> partitions_of(int n);

// Number of semistandard Young tableaux of the given shape and weight: count
// of fillings of the diagram of `shape` using weight[s] copies of symbol s+1,
// rows weakly increasing and columns strictly increasing.  Counted by
// exhaustive horizontal-strip backtracking.  Throws if the two partitions
// have different sums.
long long kostka(const Partition& shape, const Partition& weight);

// True iff `a` majorizes `b`: both sorted non-increasing, equal sums
// (otherwise throws), every prefix sum of `a` >= the prefix sum of `b`.
// Vectors of different lengths are zero-padded to a common length.
bool majorizes(const std::vector<int>& a, const std::vector<int>& b);

} // namespace coset_chains
