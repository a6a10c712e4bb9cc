#include "coset_chains/partition.hpp"

#include <algorithm>
#include <stdexcept>

namespace coset_chains {

long partition_sum(const Partition& p) {
    long s = 0;
    for (int x : p) s += x;
    return s;
}

bool is_valid_partition(const Partition& p) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0) return false;
        if (i > 0 && p[i] > p[i - 1]) return false;
    }
    return true;
}

void require_partition(const Partition& p, const char* what) {
    if (!is_valid_partition(p))
        throw std::invalid_argument(std::string(what) +
                                    ": parts must be positive and weakly decreasing");
}

namespace {

void emit_partitions(int remaining, int max_part, Partition& prefix,
                     std::vector<Partition>& out) {
    if (remaining == 0) {
        out.push_back(prefix);
        return;
    }
    for (int part = std::min(remaining, max_part); part >= 1; --part) {
        prefix.push_back(part);
        emit_partitions(remaining - part, part, prefix, out);
        prefix.pop_back();
    }
}

// Counts the ways to grow `cur` into a sub-diagram of `shape` by adding
// `cells` boxes forming a horizontal strip (at most one new box per column),
// then recursing on the remaining symbols.  `cur` has the same length as
// `shape`, padded with zero rows.
long long count_strip_fillings(const Partition& shape, std::vector<int>& cur,
                               const std::vector<int>& weight, std::size_t symbol);

long long place_strip(const Partition& shape, std::vector<int>& cur,
                      const std::vector<int>& weight, std::size_t symbol,
                      std::size_t row, int cells, int above_before) {
    if (cells == 0) {
        // Rows from `row` down stay unchanged for this symbol.
        return count_strip_fillings(shape, cur, weight, symbol + 1);
    }
    if (row == shape.size()) return 0;
    const int old = cur[row];
    // New boxes in this row must stay inside the shape and, to keep columns
    // strictly increasing, must not sit under a box added for the same
    // symbol: new length <= length the row above had *before* this symbol.
    const int hi = std::min(shape[row], above_before);
    long long total = 0;
    for (int len = old; len <= hi && len - old <= cells; ++len) {
        cur[row] = len;
        total += place_strip(shape, cur, weight, symbol, row + 1,
                             cells - (len - old), old);
    }
    cur[row] = old;
    return total;
}

long long count_strip_fillings(const Partition& shape, std::vector<int>& cur,
                               const std::vector<int>& weight, std::size_t symbol) {
    if (symbol == weight.size()) return 1; // all boxes placed; shape reached by sum
    constexpr int kNoCap = 1 << 30;
    return place_strip(shape, cur, weight, symbol, 0, weight[symbol], kNoCap);
}

} // namespace

std::vector<Partition> partitions_of(int n) {
    if (n < 1) throw std::invalid_argument("partitions_of: n must be >= 1");
    std::vector<Partition> out;
    Partition prefix;
    emit_partitions(n, n, prefix, out);
    return out;
}

long long kostka(const Partition& shape, const Partition& weight) {
    require_partition(shape, "kostka shape");
    require_partition(weight, "kostka weight");
    if (partition_sum(shape) != partition_sum(weight))
        throw std::invalid_argument("kostka: shape and weight must have equal sums");
    // Quick rejections: more rows than the weight has symbols, or a first row
    // too short to absorb the forced run of symbol 1, give zero tableaux.
    if (shape.size() > weight.size()) return 0;
    std::vector<int> cur(shape.size(), 0);
    return count_strip_fillings(shape, cur, weight, 0);
}

bool majorizes(const std::vector<int>& a, const std::vector<int>& b) {
    const std::size_t len = std::max(a.size(), b.size());
    long sa = 0, sb = 0;
    for (int x : a) sa += x;
    for (int x : b) sb += x;
    if (sa != sb) throw std::invalid_argument("majorizes: vectors must have equal sums");
    long pa = 0, pb = 0;
    for (std::size_t i = 0; i < len; ++i) {
        pa += i < a.size() ? a[i] : 0;
        pb += i < b.size() ? b[i] : 0;
        if (pa < pb) return false;
    }
    return true;
}

} // namespace coset_chains
