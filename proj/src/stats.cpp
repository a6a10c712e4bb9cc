#include "coset_chains/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "coset_chains/eigenfunctions.hpp"
#include "coset_chains/rng.hpp"

namespace coset_chains {

namespace {

Dataset make_dataset(std::string name, Table table, std::string note) {
    Dataset d;
    d.name = std::move(name);
    d.table = std::move(table);
    d.rows = row_margins(d.table);
    d.cols = col_margins(d.table);
    require_table(d.table, d.rows, d.cols);
    d.total = static_cast<long long>(partition_sum(d.rows));
    d.note = std::move(note);
    return d;
}

// Socioeconomic status of parents (rows A..F) against severity of mental
// illness, from the Midtown Manhattan Mental Health Study.
const Table kMidtown = {
    {64, 94, 58, 46},  {57, 94, 54, 40}, {57, 105, 65, 60},
    {72, 141, 77, 94}, {36, 97, 54, 78}, {21, 71, 54, 71},
};

// Month of birth (rows) against month of death (columns) for 82 descendants
// of Queen Victoria.
const Table kVictoria = {
    {1, 0, 0, 0, 1, 2, 0, 0, 1, 0, 1, 0}, {1, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 2},
    {1, 0, 0, 0, 2, 1, 0, 0, 0, 0, 0, 1}, {3, 0, 2, 0, 0, 0, 1, 0, 1, 3, 1, 1},
    {2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0}, {2, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0},
    {2, 0, 2, 1, 0, 0, 0, 0, 1, 1, 1, 2}, {0, 0, 0, 3, 0, 0, 1, 0, 0, 1, 0, 2},
    {0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 1, 0}, {1, 1, 0, 2, 0, 0, 1, 0, 0, 1, 1, 0},
    {0, 1, 1, 1, 2, 0, 0, 2, 0, 1, 1, 0}, {0, 1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0},
};

// Eye color (rows: brown, blue, hazel, green) against hair color (columns:
// black, brown, red, blond) for 592 individuals.
const Table kHairEye = {
    {68, 119, 26, 7},
    {20, 84, 17, 94},
    {15, 54, 14, 10},
    {5, 29, 14, 16},
};

Margins checked_margins(const Table& T, Margins& cols_out) {
    Margins rows = row_margins(T);
    cols_out = col_margins(T);
    require_table(T, rows, cols_out);
    return rows;
}

// Regularized lower incomplete gamma P(a, x) by its power series, for
// x < a + 1 where the series converges quickly.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int k = 0; k < 1000; ++k) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by the Lentz continued
// fraction, for x >= a + 1.
double gamma_q_fraction(double a, double x) {
    const double tiny = std::numeric_limits<double>::min() / 1e-30;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny)
            d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16)
            break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Coefficient-level double evaluation of a cell polynomial; exact rational
// evaluation is too slow for tens of thousands of sampled tables.
struct FlatTerm {
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    double coeff;
};

std::vector<FlatTerm> flatten(const CellPolynomial& poly) {
    std::vector<FlatTerm> terms;
    terms.reserve(poly.terms.size());
    for (const CellTerm& t : poly.terms)
        terms.push_back({t.cells, to_double(t.coeff)});
    return terms;
}

double evaluate_flat(const std::vector<FlatTerm>& terms, const Table& T) {
    double total = 0.0;
    for (const FlatTerm& t : terms) {
        double prod = t.coeff;
        for (const auto& [i, j] : t.cells)
            prod *= T[i][j];
        total += prod;
    }
    return total;
}

// Stars-and-bars bound on the number of tables with the given margins:
// each row independently splits into J parts.  Returns false as soon as the
// product passes the cap, so huge margins stay cheap.
bool enumeration_feasible(const Margins& rows, std::size_t n_cols,
                          std::size_t cap) {
    double bound = 1.0;
    for (int r : rows) {
        double row_count = 1.0;  // C(r + J - 1, J - 1)
        for (std::size_t k = 1; k < n_cols; ++k)
            row_count *= static_cast<double>(r + k) / static_cast<double>(k);
        bound *= row_count;
        if (bound > static_cast<double>(cap))
            return false;
    }
    return true;
}

}  // namespace

const std::vector<std::string>& builtin_dataset_names() {
    static const std::vector<std::string> names = {"midtown", "victoria",
                                                   "hair_eye"};
    return names;
}

Dataset builtin_dataset(const std::string& name) {
    if (name == "midtown")
        return make_dataset(name, kMidtown,
                            "parental socioeconomic status vs mental health, "
                            "Midtown Manhattan study (n = 1660)");
    if (name == "victoria")
        return make_dataset(name, kVictoria,
                            "birth month vs death month for 82 descendants "
                            "of Queen Victoria");
    if (name == "hair_eye")
        return make_dataset(name, kHairEye,
                            "eye color vs hair color for 592 individuals");
    throw std::invalid_argument("unknown dataset: " + name);
}

std::vector<std::vector<double>> pearson_residuals(const Table& T) {
    Margins cols;
    const Margins rows = checked_margins(T, cols);
    const double n = static_cast<double>(partition_sum(rows));
    std::vector<std::vector<double>> out(rows.size(),
                                         std::vector<double>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const double expected = rows[i] * static_cast<double>(cols[j]) / n;
            out[i][j] = (T[i][j] - expected) / std::sqrt(expected);
        }
    return out;
}

std::vector<std::vector<double>> normalized_residuals(const Table& T) {
    Margins cols;
    const Margins rows = checked_margins(T, cols);
    const Int n = partition_sum(rows);
    if (n < 2)
        throw std::invalid_argument("normalized residuals need n >= 2");
    for (int r : rows)
        if (r == n)
            throw std::invalid_argument(
                "normalized residuals need every row margin below n");
    for (int c : cols)
        if (c == n)
            throw std::invalid_argument(
                "normalized residuals need every column margin below n");
    const double nd = to_double(n);
    std::vector<std::vector<double>> out(rows.size(),
                                         std::vector<double>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const double r = rows[i], c = cols[j];
            const double expected = r * c / nd;
            const double var =
                r * c * (nd - r) * (nd - c) / (nd * nd * (nd - 1.0));
            out[i][j] = (T[i][j] - expected) / std::sqrt(var);
        }
    return out;
}

double chi_square_pvalue(double stat, long long df) {
    if (df < 1)
        throw std::invalid_argument("degrees of freedom must be positive");
    if (!(stat > 0.0))
        return 1.0;
    const double a = 0.5 * static_cast<double>(df);
    const double x = 0.5 * stat;
    if (x < a + 1.0)
        return 1.0 - gamma_p_series(a, x);
    return gamma_q_fraction(a, x);
}

Chi2Decomposition chi2_decomposition(const Table& T) {
    Margins cols;
    const Margins rows = checked_margins(T, cols);
    const Int n = partition_sum(rows);
    if (n < 3)
        throw std::invalid_argument("chi-square decomposition needs n >= 3");
    Chi2Decomposition parts;
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const Int r = rows[i], c = cols[j];
            const Rat K(2 * r * c - 2 * r - 2 * c + n, n - 2);
            const Rat L(r * c * (1 + r * c - r - c), (n - 1) * (n - 2));
            const Rat M(r * c, n);
            const Rat x = T[i][j];
            parts.quadratic += (x * x - K * x + L) / M;
            parts.linear += (K - 2 * M) / M * (x - M);
            parts.constant += K - M - L / M;
        }
    return parts;
}

std::vector<PanelEntry> quadratic_residual_panel(const Table& T,
                                                 const PanelOptions& options) {
    Margins cols;
    const Margins rows = checked_margins(T, cols);
    if (partition_sum(rows) < 3)
        throw std::invalid_argument("residual panel needs n >= 3");
    if (options.samples < 2)
        throw std::invalid_argument("residual panel needs at least 2 samples");

    const bool exact =
        enumeration_feasible(rows, cols.size(), options.enumeration_cap);
    std::vector<Table> space;
    std::vector<Rat> pi;
    std::vector<Table> draws;
    if (exact) {
        space = enumerate_tables(rows, cols);
        pi.reserve(space.size());
        for (const Table& S : space)
            pi.push_back(fisher_yates_pmf(S, rows, cols));
    } else {
        SplitMix64 rng(options.seed);
        draws.reserve(static_cast<std::size_t>(options.samples));
        for (long long s = 0; s < options.samples; ++s)
            draws.push_back(sample_fisher_yates(rows, cols, rng));
    }

    std::vector<PanelEntry> panel;
    const std::size_t cells = rows.size() * cols.size();
    panel.reserve(cells * (cells + 1) / 2);
    for (std::size_t a = 0; a < cells; ++a)
        for (std::size_t b = a; b < cells; ++b) {
            PanelEntry entry;
            entry.i = a / cols.size();
            entry.j = a % cols.size();
            entry.k = b / cols.size();
            entry.l = b % cols.size();
            const CellPolynomial f =
                quadratic_f(rows, cols, entry.i, entry.j, entry.k, entry.l);
            if (exact) {
                Rat second_moment = 0;
                for (std::size_t s = 0; s < space.size(); ++s) {
                    const Rat v = evaluate(f, space[s]);
                    second_moment += pi[s] * v * v;
                }
                entry.exact_variance = true;
                entry.variance = to_double(second_moment);
                entry.variance_ci_low = entry.variance;
                entry.variance_ci_high = entry.variance;
            } else {
                const std::vector<FlatTerm> flat = flatten(f);
                double mean_sq = 0.0, mean_fourth = 0.0;
                for (const Table& S : draws) {
                    const double v = evaluate_flat(flat, S);
                    mean_sq += v * v;
                    mean_fourth += v * v * v * v;
                }
                const double S = static_cast<double>(options.samples);
                mean_sq /= S;
                mean_fourth /= S;
                const double se =
                    std::sqrt(std::max(mean_fourth - mean_sq * mean_sq, 0.0) / S);
                entry.exact_variance = false;
                entry.variance = mean_sq;
                entry.variance_ci_low = std::max(mean_sq - 1.96 * se, 0.0);
                entry.variance_ci_high = mean_sq + 1.96 * se;
            }
            entry.value = entry.variance > 0.0
                              ? to_double(evaluate(f, T)) /
                                    std::sqrt(entry.variance)
                              : 0.0;
            panel.push_back(entry);
        }
    return panel;
}

}  // namespace coset_chains
