#include "coset_chains/chains.hpp"

#include <algorithm>
#include <stdexcept>

namespace coset_chains {

namespace {

// Apply the minor move with pivots (i1,j1), (i2,j2): pivots decrement, the
// opposite corners increment.
Table apply_minor(const Table& T, int i1, int j1, int i2, int j2) {
    Table out = T;
    --out[i1][j1];
    --out[i2][j2];
    ++out[i1][j2];
    ++out[i2][j1];
    return out;
}

// Walk every unordered row pair, column pair and orientation; pivots are
// (i1, a), (i2, b) with {a, b} = {j1, j2}.
template <typename Fn>
void for_each_minor(std::size_t I, std::size_t J, Fn&& fn) {
    for (std::size_t i1 = 0; i1 < I; ++i1)
        for (std::size_t i2 = i1 + 1; i2 < I; ++i2)
            for (std::size_t j1 = 0; j1 < J; ++j1)
                for (std::size_t j2 = j1 + 1; j2 < J; ++j2) {
                    fn(i1, j1, i2, j2);
                    fn(i1, j2, i2, j1);
                }
}

} // namespace

TableRow rt_row(const Table& T, bool no_holding) {
    const Margins rows = row_margins(T), cols = col_margins(T);
    require_table(T, rows, cols);
    const long n = partition_sum(rows);
    TableRow out;
    out.holding = 1;
    for_each_minor(rows.size(), cols.size(), [&](std::size_t i1, std::size_t j1,
                                                 std::size_t i2, std::size_t j2) {
        const long pivots = static_cast<long>(T[i1][j1]) * T[i2][j2];
        if (pivots == 0) return;
        const Int den = no_holding ? Int(n) * (n - 1) : Int(n) * n;
        const Rat p(2 * pivots, den);
        out.moves.emplace_back(apply_minor(T, i1, j1, i2, j2), p);
        out.holding -= p;
    });
    return out;
}

Table rt_sample_step(const Table& T, SplitMix64& rng) {
    const Margins rows = row_margins(T);
    const long n = partition_sum(rows);
    // locate the cell holding the r-th item (0-based) in row-major order
    const auto locate = [&](long r, int& i, int& j) {
        for (i = 0; i < static_cast<int>(T.size()); ++i)
            for (j = 0; j < static_cast<int>(T[i].size()); ++j) {
                r -= T[i][j];
                if (r < 0) return;
            }
    };
    int i1 = 0, j1 = 0, i2 = 0, j2 = 0;
    locate(static_cast<long>(rng.below(n)), i1, j1);
    locate(static_cast<long>(rng.below(n)), i2, j2);
    if (i1 == i2 || j1 == j2) return T;
    return apply_minor(T, i1, j1, i2, j2);
}

Permutation sn_rt_step(const Permutation& sigma, SplitMix64& rng) {
    Permutation out = sigma;
    if (out.size() < 2) return out;
    const std::size_t a = rng.below(out.size());
    const std::size_t b = rng.below(out.size());
    std::swap(out[a], out[b]);
    return out;
}

TableRow uniform_swap_row(const Table& T) {
    const Margins rows = row_margins(T), cols = col_margins(T);
    require_table(T, rows, cols);
    const Int IJ2 = Int(rows.size() * cols.size()) * Int(rows.size() * cols.size());
    TableRow out;
    out.holding = 1;
    for_each_minor(rows.size(), cols.size(), [&](std::size_t i1, std::size_t j1,
                                                 std::size_t i2, std::size_t j2) {
        if (T[i1][j1] == 0 || T[i2][j2] == 0) return;  // rejected proposal
        const Rat p(2, IJ2);
        out.moves.emplace_back(apply_minor(T, i1, j1, i2, j2), p);
        out.holding -= p;
    });
    return out;
}

TableRow metropolis_uniform_row(const Table& T) {
    const Margins rows = row_margins(T), cols = col_margins(T);
    require_table(T, rows, cols);
    const long n = partition_sum(rows);
    TableRow out;
    out.holding = 1;
    for_each_minor(rows.size(), cols.size(), [&](std::size_t i1, std::size_t j1,
                                                 std::size_t i2, std::size_t j2) {
        const long fwd = static_cast<long>(T[i1][j1]) * T[i2][j2];
        if (fwd == 0) return;
        const long rev = static_cast<long>(T[i1][j2] + 1) * (T[i2][j1] + 1);
        const Rat p(2 * std::min(fwd, rev), Int(n) * n);
        out.moves.emplace_back(apply_minor(T, i1, j1, i2, j2), p);
        out.holding -= p;
    });
    return out;
}

TableRow metropolis_fy_row(const Table& T) {
    const Margins rows = row_margins(T), cols = col_margins(T);
    require_table(T, rows, cols);
    const Int IJ2 = Int(rows.size() * cols.size()) * Int(rows.size() * cols.size());
    TableRow out;
    out.holding = 1;
    for_each_minor(rows.size(), cols.size(), [&](std::size_t i1, std::size_t j1,
                                                 std::size_t i2, std::size_t j2) {
        const long fwd = static_cast<long>(T[i1][j1]) * T[i2][j2];
        if (fwd == 0) return;  // acceptance ratio zero: fold into holding
        const long rev = static_cast<long>(T[i1][j2] + 1) * (T[i2][j1] + 1);
        const Rat p = Rat(2, IJ2) * std::min(Rat(1), Rat(fwd, rev));
        out.moves.emplace_back(apply_minor(T, i1, j1, i2, j2), p);
        out.holding -= p;
    });
    return out;
}

Table3Row three_way_row(const Table3& T) {
    const Margins a = axis_margins(T, 0), b = axis_margins(T, 1),
                  c = axis_margins(T, 2);
    require_table3(T, a, b, c);
    const long n = partition_sum(a);
    // collect the nonzero cells once
    struct Cell {
        int i, j, k, count;
    };
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < T.size(); ++i)
        for (std::size_t j = 0; j < T[i].size(); ++j)
            for (std::size_t k = 0; k < T[i][j].size(); ++k)
                if (T[i][j][k] > 0)
                    cells.push_back({static_cast<int>(i), static_cast<int>(j),
                                     static_cast<int>(k), T[i][j][k]});
    std::map<Table3, Rat> agg;
    Rat moved = 0;
    const Int den = Int(3) * n * n;
    for (std::size_t u = 0; u < cells.size(); ++u)
        for (std::size_t v = u + 1; v < cells.size(); ++v)
            for (int axis = 0; axis < 3; ++axis) {
                int c1[3] = {cells[u].i, cells[u].j, cells[u].k};
                int c2[3] = {cells[v].i, cells[v].j, cells[v].k};
                if (c1[axis] == c2[axis]) continue;  // swap changes nothing
                int d1[3] = {c1[0], c1[1], c1[2]};
                int d2[3] = {c2[0], c2[1], c2[2]};
                std::swap(d1[axis], d2[axis]);
                Table3 to = T;
                --to[c1[0]][c1[1]][c1[2]];
                --to[c2[0]][c2[1]][c2[2]];
                ++to[d1[0]][d1[1]][d1[2]];
                ++to[d2[0]][d2[1]][d2[2]];
                if (to == T) continue;  // cells differed only along `axis`
                const Rat p(2 * static_cast<long>(cells[u].count) * cells[v].count,
                            den);
                agg[to] += p;
                moved += p;
            }
    Table3Row out;
    out.holding = 1 - moved;
    out.moves.assign(agg.begin(), agg.end());
    return out;
}

Table collapse_to_2x2(const Table& T) {
    const Margins rows = row_margins(T), cols = col_margins(T);
    require_table(T, rows, cols);
    if (rows.size() < 2 || cols.size() < 2)
        throw std::invalid_argument("collapse_to_2x2: need at least two rows and columns");
    const int n = static_cast<int>(partition_sum(rows));
    const int x = T[0][0];
    return {{x, rows[0] - x}, {cols[0] - x, n - rows[0] - cols[0] + x}};
}

const char* kernel_name(KernelKind kind) {
    switch (kind) {
        case KernelKind::RandomTranspositions: return "rt";
        case KernelKind::RandomTranspositionsNoHolding: return "rt-no-holding";
        case KernelKind::UniformSwap: return "uniform-swap";
        case KernelKind::MetropolisUniform: return "metropolis-uniform";
        case KernelKind::MetropolisFisherYates: return "metropolis-fy";
    }
    throw std::invalid_argument("kernel_name: bad kind");
}

KernelKind kernel_by_name(const std::string& name) {
    for (KernelKind kind :
         {KernelKind::RandomTranspositions, KernelKind::RandomTranspositionsNoHolding,
          KernelKind::UniformSwap, KernelKind::MetropolisUniform,
          KernelKind::MetropolisFisherYates})
        if (name == kernel_name(kind)) return kind;
    throw std::invalid_argument("unknown kernel: " + name);
}

ChainKernel::ChainKernel(KernelKind kind, Margins rows, Margins cols)
    : kind_(kind), rows_(std::move(rows)), cols_(std::move(cols)),
      states_(enumerate_tables(rows_, cols_)) {
    for (std::size_t s = 0; s < states_.size(); ++s) index_[states_[s]] = s;
}

std::size_t ChainKernel::index_of(const Table& T) const {
    const auto it = index_.find(T);
    if (it == index_.end())
        throw std::out_of_range("ChainKernel: table not in the state space");
    return it->second;
}

TableRow ChainKernel::table_row(const Table& T) const {
    switch (kind_) {
        case KernelKind::RandomTranspositions: return rt_row(T);
        case KernelKind::RandomTranspositionsNoHolding: return rt_row(T, true);
        case KernelKind::UniformSwap: return uniform_swap_row(T);
        case KernelKind::MetropolisUniform: return metropolis_uniform_row(T);
        case KernelKind::MetropolisFisherYates: return metropolis_fy_row(T);
    }
    throw std::invalid_argument("ChainKernel: bad kind");
}

std::vector<std::pair<std::size_t, Rat>> ChainKernel::row(std::size_t state) const {
    const TableRow r = table_row(states_.at(state));
    std::vector<std::pair<std::size_t, Rat>> out;
    out.reserve(r.moves.size() + 1);
    for (const auto& [to, p] : r.moves) out.emplace_back(index_of(to), p);
    if (r.holding != 0) out.emplace_back(state, r.holding);
    return out;
}

std::vector<Rat> ChainKernel::stationary() const {
    std::vector<Rat> pi(states_.size());
    switch (kind_) {
        case KernelKind::RandomTranspositions:
        case KernelKind::RandomTranspositionsNoHolding:
        case KernelKind::MetropolisFisherYates:
            for (std::size_t s = 0; s < states_.size(); ++s)
                pi[s] = fisher_yates_pmf(states_[s], rows_, cols_);
            break;
        case KernelKind::UniformSwap:
        case KernelKind::MetropolisUniform:
            for (auto& p : pi) p = Rat(1, states_.size());
            break;
    }
    return pi;
}

}  // namespace coset_chains
