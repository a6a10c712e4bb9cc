#include "coset_chains/table.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace coset_chains {

void require_margins(const Margins& m, const char* what) {
    if (m.empty())
        throw std::invalid_argument(std::string(what) + ": margins must be nonempty");
    for (int x : m)
        if (x < 1)
            throw std::invalid_argument(std::string(what) +
                                        ": margin entries must be positive");
}

void require_table(const Table& T, const Margins& rows, const Margins& cols) {
    require_margins(rows, "rows");
    require_margins(cols, "cols");
    if (partition_sum(rows) != partition_sum(cols))
        throw std::invalid_argument("table margins must have equal sums");
    if (T.size() != rows.size())
        throw std::invalid_argument("table has the wrong number of rows");
    for (std::size_t i = 0; i < T.size(); ++i) {
        if (T[i].size() != cols.size())
            throw std::invalid_argument("table has the wrong number of columns");
        for (int x : T[i])
            if (x < 0) throw std::invalid_argument("table entries must be non-negative");
    }
    if (row_margins(T) != rows || col_margins(T) != cols)
        throw std::invalid_argument("table does not match the given margins");
}

Margins row_margins(const Table& T) {
    Margins out(T.size(), 0);
    for (std::size_t i = 0; i < T.size(); ++i)
        for (int x : T[i]) out[i] += x;
    return out;
}

Margins col_margins(const Table& T) {
    if (T.empty()) return {};
    Margins out(T[0].size(), 0);
    for (const auto& row : T)
        for (std::size_t j = 0; j < row.size(); ++j) out[j] += row[j];
    return out;
}

std::size_t max_enumeration_states() {
    if (const char* env = std::getenv("COSET_CHAINS_MAX_STATES")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return 2'000'000;
}

namespace {

// Recursive enumeration, one row at a time.  Within a row the value of each
// cell ranges over [max(0, rowrem - later), min(rowrem, colrem_j)] where
// `later` is the total column slack to the right; every choice in that window
// extends to a full table, so the recursion never dead-ends.
struct TableEnumerator {
    const Margins& rows;
    const Margins& cols;
    std::size_t cap;
    Table cur;
    Margins colrem;
    std::vector<Table> out;

    TableEnumerator(const Margins& r, const Margins& c)
        : rows(r), cols(c), cap(max_enumeration_states()),
          cur(r.size(), std::vector<int>(c.size(), 0)), colrem(c) {}

    void run() { row(0); }

    void row(std::size_t i) {
        if (i == rows.size()) {
            if (out.size() >= cap) throw std::runtime_error("state space too large");
            out.push_back(cur);
            return;
        }
        long later = 0;
        for (std::size_t j = 1; j < colrem.size(); ++j) later += colrem[j];
        cell(i, 0, rows[i], later);
    }

    void cell(std::size_t i, std::size_t j, int rowrem, long later) {
        if (j == cols.size()) {
            row(i + 1);
            return;
        }
        const int hi = std::min<long>(rowrem, colrem[j]);
        const int lo = static_cast<int>(std::max<long>(0, rowrem - later));
        const long next_later = j + 1 < cols.size() ? later - colrem[j + 1] : 0;
        for (int v = hi; v >= lo; --v) {
            cur[i][j] = v;
            colrem[j] -= v;
            cell(i, j + 1, rowrem - v, next_later);
            colrem[j] += v;
        }
        cur[i][j] = 0;
    }
};

} // namespace

std::vector<Table> enumerate_tables(const Margins& rows, const Margins& cols) {
    require_margins(rows, "rows");
    require_margins(cols, "cols");
    if (partition_sum(rows) != partition_sum(cols))
        throw std::invalid_argument("margins must have equal sums");
    TableEnumerator e(rows, cols);
    e.run();
    return std::move(e.out);
}

Int coset_size(const Table& T, const Margins& rows, const Margins& cols) {
    require_table(T, rows, cols);
    Int num = 1, den = 1;
    for (int x : rows) num *= factorial(x);
    for (int x : cols) num *= factorial(x);
    for (const auto& row : T)
        for (int x : row) den *= factorial(x);
    return num / den;
}

Rat fisher_yates_pmf(const Table& T, const Margins& rows, const Margins& cols) {
    return Rat(coset_size(T, rows, cols), factorial(partition_sum(rows)));
}

namespace {

// block_label[v] = index of the block of `cuts` containing v, for v = 1..n.
std::vector<int> block_labels(const Margins& cuts) {
    std::vector<int> labels(1, -1);  // labels[0] unused
    for (std::size_t b = 0; b < cuts.size(); ++b)
        labels.insert(labels.end(), cuts[b], static_cast<int>(b));
    return labels;
}

void require_permutation(const Permutation& sigma) {
    std::vector<char> seen(sigma.size() + 1, 0);
    for (int v : sigma) {
        if (v < 1 || v > static_cast<int>(sigma.size()) || seen[v])
            throw std::invalid_argument("not a permutation of 1..n");
        seen[v] = 1;
    }
}

} // namespace

Table permutation_to_table(const Permutation& sigma, const Margins& rows,
                           const Margins& cols) {
    require_margins(rows, "rows");
    require_margins(cols, "cols");
    const long n = partition_sum(rows);
    if (partition_sum(cols) != n || static_cast<long>(sigma.size()) != n)
        throw std::invalid_argument("permutation length must match the margins");
    require_permutation(sigma);
    const auto row_of = block_labels(rows);   // position blocks
    const auto col_of = block_labels(cols);   // value blocks
    Table T(rows.size(), std::vector<int>(cols.size(), 0));
    for (long k = 1; k <= n; ++k) ++T[row_of[k]][col_of[sigma[k - 1]]];
    return T;
}

Permutation min_coset_representative(const Table& T, const Margins& rows,
                                     const Margins& cols) {
    require_table(T, rows, cols);
    // next unused value in each column block, in increasing order
    Margins next(cols.size());
    int start = 1;
    for (std::size_t j = 0; j < cols.size(); ++j) {
        next[j] = start;
        start += cols[j];
    }
    Permutation sigma;
    sigma.reserve(partition_sum(rows));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            for (int t = 0; t < T[i][j]; ++t) sigma.push_back(next[j]++);
    return sigma;
}

Table sample_fisher_yates(const Margins& rows, const Margins& cols,
                          SplitMix64& rng) {
    const long n = partition_sum(rows);
    Permutation sigma(n);
    std::iota(sigma.begin(), sigma.end(), 1);
    for (long k = n - 1; k > 0; --k)
        std::swap(sigma[k], sigma[rng.below(k + 1)]);
    return permutation_to_table(sigma, rows, cols);
}

Rat expected_entry(const Margins& rows, const Margins& cols, int i, int j) {
    require_margins(rows, "rows");
    require_margins(cols, "cols");
    return Rat(Int(rows.at(i)) * cols.at(j), partition_sum(rows));
}

Rat cross_moment(const Margins& rows, const Margins& cols, int i, int j,
                 int k, int l) {
    require_margins(rows, "rows");
    require_margins(cols, "cols");
    const long n = partition_sum(rows);
    const Int ri = rows.at(i), rk = rows.at(k), cj = cols.at(j), cl = cols.at(l);
    Rat res = 0;
    if (i == k && j == l) res += Rat(ri * cj, n);
    const Int rterm = ri * rk - (i == k ? ri : 0);
    const Int cterm = cj * cl - (j == l ? cj : 0);
    if (rterm != 0 && cterm != 0)
        res += Rat(rterm * cterm, Int(n) * (n - 1));
    return res;
}

Rat chi_square_statistic(const Table& T) {
    const Margins rows = row_margins(T), cols = col_margins(T);
    require_table(T, rows, cols);
    const Int n = partition_sum(rows);
    Rat total = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const Int dev = n * T[i][j] - Int(rows[i]) * cols[j];
            total += Rat(dev * dev, n * rows[i] * cols[j]);
        }
    return total;
}

bool table_majorizes(const Table& a, const Table& b) {
    if (row_margins(a) != row_margins(b) || col_margins(a) != col_margins(b))
        throw std::invalid_argument("table_majorizes: margins differ");
    std::vector<int> fa, fb;
    for (const auto& row : a) fa.insert(fa.end(), row.begin(), row.end());
    for (const auto& row : b) fb.insert(fb.end(), row.begin(), row.end());
    std::sort(fa.rbegin(), fa.rend());
    std::sort(fb.rbegin(), fb.rend());
    return majorizes(fb, fa);
}

Rat theta_factorial(int m, const Rat& theta) {
    if (m < 0) throw std::invalid_argument("theta_factorial: negative argument");
    Rat result = 1, bracket = 0, power = 1;
    for (int t = 1; t <= m; ++t) {
        bracket += power;  // 1 + theta + ... + theta^{t-1}
        result *= bracket;
        power *= theta;
    }
    return result;
}

Rat q_coset_weight(const Table& T, const Rat& theta) {
    if (theta <= 0 || theta > 1)
        throw std::domain_error("q_coset_weight: theta must lie in (0, 1]");
    const Margins rows = row_margins(T), cols = col_margins(T);
    require_table(T, rows, cols);
    const long n = partition_sum(rows);
    long inv = 0;  // sum over pairs of cells in "increasing" position
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t ii = i + 1; ii < rows.size(); ++ii)
            for (std::size_t j = 0; j < cols.size(); ++j)
                for (std::size_t jj = j + 1; jj < cols.size(); ++jj)
                    inv += static_cast<long>(T[i][j]) * T[ii][jj];
    Rat w = rat_pow(theta, -n * n + inv) * rat_pow(1 - theta, n);
    for (int x : rows) w *= theta_factorial(x, theta);
    for (int x : cols) w *= theta_factorial(x, theta);
    for (const auto& row : T)
        for (int x : row) w /= theta_factorial(x, theta);
    return w;
}

// ---------------------------------------------------------------- file IO ---

namespace {

Table table_from_parsed_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("rows") || !doc["rows"].is_array())
        throw std::runtime_error("table JSON: expected an object with a \"rows\" array");
    Table T;
    for (const auto& row : doc["rows"]) {
        if (!row.is_array())
            throw std::runtime_error("table JSON: \"rows\" must hold arrays");
        std::vector<int> r;
        for (const auto& x : row) {
            if (!x.is_number_integer())
                throw std::runtime_error("table JSON: entries must be integers");
            r.push_back(x.get<int>());
        }
        T.push_back(std::move(r));
    }
    if (T.empty()) throw std::runtime_error("table JSON: no rows");
    for (const auto& r : T)
        if (r.size() != T[0].size())
            throw std::runtime_error("table JSON: ragged rows");
    if (doc.contains("row_sums") &&
        doc["row_sums"].get<std::vector<int>>() != row_margins(T))
        throw std::runtime_error("table JSON: row_sums do not match the matrix");
    if (doc.contains("col_sums") &&
        doc["col_sums"].get<std::vector<int>>() != col_margins(T))
        throw std::runtime_error("table JSON: col_sums do not match the matrix");
    return T;
}

} // namespace

Table table_from_json(const std::string& text) {
    try {
        return table_from_parsed_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("table JSON: ") + e.what());
    }
}

std::string table_to_json(const Table& T) {
    nlohmann::json doc;
    doc["rows"] = T;
    doc["row_sums"] = row_margins(T);
    doc["col_sums"] = col_margins(T);
    return doc.dump(2);
}

Table table_from_csv(const std::string& text) {
    Table T;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<int> row;
        std::istringstream fields(line);
        std::string field;
        while (std::getline(fields, field, ',')) {
            std::size_t pos = 0;
            int value = 0;
            try {
                value = std::stoi(field, &pos);
            } catch (const std::exception&) {
                throw std::runtime_error("table CSV: bad entry '" + field + "'");
            }
            if (field.find_first_not_of(" \t\r", pos) != std::string::npos)
                throw std::runtime_error("table CSV: bad entry '" + field + "'");
            row.push_back(value);
        }
        if (row.empty()) throw std::runtime_error("table CSV: empty row");
        T.push_back(std::move(row));
    }
    if (T.empty()) throw std::runtime_error("table CSV: no rows");
    for (const auto& r : T)
        if (r.size() != T[0].size()) throw std::runtime_error("table CSV: ragged rows");
    return T;
}

std::string table_to_csv(const Table& T) {
    std::ostringstream out;
    for (const auto& row : T) {
        for (std::size_t j = 0; j < row.size(); ++j)
            out << (j ? "," : "") << row[j];
        out << '\n';
    }
    return out.str();
}

Table load_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto dot = path.find_last_of('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    if (ext == "json") return table_from_json(buf.str());
    if (ext == "csv") return table_from_csv(buf.str());
    throw std::runtime_error("unsupported table format (want .json or .csv): " + path);
}

// --------------------------------------------------------- three-way tables ---

Margins axis_margins(const Table3& T, int axis) {
    if (axis < 0 || axis > 2)
        throw std::invalid_argument("axis_margins: axis must be 0, 1 or 2");
    if (T.empty() || T[0].empty() || T[0][0].empty())
        throw std::invalid_argument("axis_margins: empty table");
    const std::size_t dims[3] = {T.size(), T[0].size(), T[0][0].size()};
    Margins out(dims[axis], 0);
    for (std::size_t i = 0; i < dims[0]; ++i)
        for (std::size_t j = 0; j < dims[1]; ++j)
            for (std::size_t k = 0; k < dims[2]; ++k) {
                const std::size_t idx[3] = {i, j, k};
                out[idx[axis]] += T[i][j][k];
            }
    return out;
}

void require_table3(const Table3& T, const Margins& a, const Margins& b,
                    const Margins& c) {
    require_margins(a, "axis 0");
    require_margins(b, "axis 1");
    require_margins(c, "axis 2");
    if (partition_sum(a) != partition_sum(b) || partition_sum(b) != partition_sum(c))
        throw std::invalid_argument("three-way margins must have equal sums");
    if (T.size() != a.size())
        throw std::invalid_argument("three-way table has the wrong extent on axis 0");
    for (const auto& slab : T) {
        if (slab.size() != b.size())
            throw std::invalid_argument("three-way table has the wrong extent on axis 1");
        for (const auto& line : slab) {
            if (line.size() != c.size())
                throw std::invalid_argument("three-way table has the wrong extent on axis 2");
            for (int x : line)
                if (x < 0)
                    throw std::invalid_argument("table entries must be non-negative");
        }
    }
    if (axis_margins(T, 0) != a || axis_margins(T, 1) != b || axis_margins(T, 2) != c)
        throw std::invalid_argument("three-way table does not match the given margins");
}

Int factorial_product3(const Table3& T) {
    Int p = 1;
    for (const auto& slab : T)
        for (const auto& line : slab)
            for (int x : line) p *= factorial(x);
    return p;
}

namespace {

// Enumerates three-way tables slab by slab (axis 0).  Any partial state with
// consistent remainders extends to a full table at slab granularity, but the
// min(remb, remc) capacity bound used inside a slab can overestimate, so the
// recursion may backtrack; at the sizes supported here that is cheap.
struct Table3Enumerator {
    const Margins& a;
    const Margins& b;
    const Margins& c;
    std::size_t cap;
    Margins remb, remc;
    std::vector<int> cur;  // row-major cells, |b|*|c| per slab
    std::size_t count = 0;
    std::vector<std::uint8_t>* packed;
    std::size_t stride;

    Table3Enumerator(const Margins& a_, const Margins& b_, const Margins& c_,
                     std::vector<std::uint8_t>* out, std::size_t stride_)
        : a(a_), b(b_), c(c_), cap(max_enumeration_states()), remb(b_), remc(c_),
          cur(a_.size() * b_.size() * c_.size(), 0), packed(out), stride(stride_) {}

    void run() { slab(0); }

    void emit() {
        if (count >= cap) throw std::runtime_error("state space too large");
        const std::size_t base = packed->size();
        packed->resize(base + stride, 0);
        std::uint8_t* out = packed->data() + base;
        for (std::size_t t = 0; t < cur.size(); ++t)
            out[t / 2] |= static_cast<std::uint8_t>(cur[t]) << (t % 2 ? 0 : 4);
        ++count;
    }

    long capacity_after(std::size_t j, std::size_t k) const {
        // total min(remb, remc) over cells of the current slab after (j,k)
        long cap_ = 0;
        for (std::size_t kk = k + 1; kk < c.size(); ++kk)
            cap_ += std::min(remb[j], remc[kk]);
        for (std::size_t jj = j + 1; jj < b.size(); ++jj)
            for (std::size_t kk = 0; kk < c.size(); ++kk)
                cap_ += std::min(remb[jj], remc[kk]);
        return cap_;
    }

    void slab(std::size_t i) {
        if (i == a.size()) {
            emit();
            return;
        }
        cell(i, 0, 0, a[i]);
    }

    void cell(std::size_t i, std::size_t j, std::size_t k, int slabrem) {
        if (slabrem == 0) {  // rest of the slab is forced to zero
            slab(i + 1);
            return;
        }
        if (j == b.size()) return;  // slabrem > 0 cannot be placed: dead end
        if (k == c.size()) {
            cell(i, j + 1, 0, slabrem);
            return;
        }
        const int hi = std::min(slabrem, std::min(remb[j], remc[k]));
        const int lo = static_cast<int>(
            std::max<long>(0, slabrem - capacity_after(j, k)));
        if (hi < lo) return;
        const std::size_t t = (i * b.size() + j) * c.size() + k;
        for (int v = hi; v >= lo; --v) {
            cur[t] = v;
            remb[j] -= v;
            remc[k] -= v;
            cell(i, j, k + 1, slabrem - v);
            remb[j] += v;
            remc[k] += v;
        }
        cur[t] = 0;
    }
};

} // namespace

Table3Space::Table3Space(Margins a, Margins b, Margins c)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
    require_margins(a_, "axis 0");
    require_margins(b_, "axis 1");
    require_margins(c_, "axis 2");
    if (partition_sum(a_) != partition_sum(b_) ||
        partition_sum(b_) != partition_sum(c_))
        throw std::invalid_argument("three-way margins must have equal sums");
    const int biggest = std::max({*std::max_element(a_.begin(), a_.end()),
                                  *std::max_element(b_.begin(), b_.end()),
                                  *std::max_element(c_.begin(), c_.end())});
    if (biggest > 15)
        throw std::invalid_argument(
            "three-way spaces support margin entries up to 15");
    cells_ = a_.size() * b_.size() * c_.size();
    stride_ = (cells_ + 1) / 2;
    Table3Enumerator e(a_, b_, c_, &packed_, stride_);
    e.run();
    count_ = e.count;
}

const Margins& Table3Space::margins(int axis) const {
    switch (axis) {
        case 0: return a_;
        case 1: return b_;
        case 2: return c_;
    }
    throw std::invalid_argument("margins: axis must be 0, 1 or 2");
}

Table3 Table3Space::table(std::size_t idx) const {
    if (idx >= count_) throw std::out_of_range("Table3Space::table: bad index");
    const std::uint8_t* in = packed_.data() + idx * stride_;
    Table3 T(a_.size(), Table(b_.size(), std::vector<int>(c_.size(), 0)));
    for (std::size_t t = 0; t < cells_; ++t) {
        const int v = (in[t / 2] >> (t % 2 ? 0 : 4)) & 0xf;
        T[t / (b_.size() * c_.size())][(t / c_.size()) % b_.size()][t % c_.size()] = v;
    }
    return T;
}

void Table3Space::pack_into(const Table3& T, std::uint8_t* out) const {
    std::memset(out, 0, stride_);
    std::size_t t = 0;
    for (const auto& slab : T)
        for (const auto& line : slab)
            for (int x : line) {
                out[t / 2] |= static_cast<std::uint8_t>(x) << (t % 2 ? 0 : 4);
                ++t;
            }
}

std::size_t Table3Space::index_of(const Table3& T) const {
    require_table3(T, a_, b_, c_);
    std::vector<std::uint8_t> key(stride_, 0);
    pack_into(T, key.data());
    // states are in decreasing lexicographic order
    std::size_t lo = 0, hi = count_;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        const int cmp = std::memcmp(packed_.data() + mid * stride_, key.data(), stride_);
        if (cmp > 0)
            lo = mid + 1;
        else if (cmp < 0)
            hi = mid;
        else
            return mid;
    }
    throw std::out_of_range("index_of: table not in this space");
}

std::vector<Table3> enumerate_tables3(const Margins& a, const Margins& b,
                                      const Margins& c) {
    Table3Space space(a, b, c);
    std::vector<Table3> out;
    out.reserve(space.size());
    for (std::size_t s = 0; s < space.size(); ++s) out.push_back(space.table(s));
    return out;
}

}  // namespace coset_chains
