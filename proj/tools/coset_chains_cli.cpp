// Command-line surface over the table-chain library: enumeration and exact
// sampling, spectra, distribution evolution, mixing profiles, closed-form
// mixing bounds, relaxation-time comparison, residual analysis of observed
// tables, and the three-way chain.  Every subcommand is a thin adapter over
// the library; no numeric logic lives here.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "coset_chains/chains.hpp"
#include "coset_chains/eigenfunctions.hpp"
#include "coset_chains/mixing.hpp"
#include "coset_chains/rational.hpp"
#include "coset_chains/rng.hpp"
#include "coset_chains/spectral.hpp"
#include "coset_chains/stats.hpp"
#include "coset_chains/table.hpp"

using namespace coset_chains;
using json = nlohmann::ordered_json;

namespace {

std::string rat_str(const Rat& r) {
    std::ostringstream oss;
    oss << r;
    return oss.str();
}

json table_json(const Table& T) {
    json rows = json::array();
    for (const auto& row : T)
        rows.push_back(row);
    return rows;
}

void print_table(std::ostream& out, const Table& T) {
    for (const auto& row : T) {
        for (std::size_t j = 0; j < row.size(); ++j)
            out << (j ? " " : "") << row[j];
        out << '\n';
    }
}

std::string table_inline(const Table& T) {
    std::ostringstream oss;
    for (std::size_t i = 0; i < T.size(); ++i) {
        if (i)
            oss << " | ";
        for (std::size_t j = 0; j < T[i].size(); ++j)
            oss << (j ? " " : "") << T[i][j];
    }
    return oss.str();
}

std::string csv_flat(const Table& T) {
    std::ostringstream oss;
    bool first = true;
    for (const auto& row : T)
        for (int x : row) {
            if (!first)
                oss << ',';
            oss << x;
            first = false;
        }
    return oss.str();
}

std::string partition_str(const Partition& rho) {
    std::ostringstream oss;
    oss << '(';
    for (std::size_t i = 0; i < rho.size(); ++i)
        oss << (i ? "," : "") << rho[i];
    oss << ')';
    return oss.str();
}

// Output sink: stdout by default, a file when --out was given.
struct Sink {
    std::ofstream file;
    std::ostream* stream = &std::cout;

    void open(const std::string& path) {
        if (path.empty())
            return;
        file.open(path);
        if (!file)
            throw std::runtime_error("cannot open output file: " + path);
        stream = &file;
    }
    std::ostream& out() { return *stream; }
};

// Shared subcommand state, filled by CLI11.
struct Args {
    Margins rows, cols, slabs;
    std::string format;  // empty = the subcommand's natural default
    std::string out_path;
    std::string table_path;
    std::string dataset;
    std::string chain = "rt";
    bool exact = false;
    bool count_only = false;
    bool check = false;
    bool panel = false;
    long long n_samples = 1;
    long long t = 1;
    long long t_max = 20;
    long long start = -1;
    long long panel_samples = 20000;
    std::uint64_t seed = 0;
    double c = 1.0;
    std::vector<long long> cell;
    long long col_index = -1;
};

std::string pick_format(const Args& a, const char* natural) {
    return a.format.empty() ? natural : a.format;
}

// Resolve the start state: an explicit index, or a table loaded from file.
std::size_t start_state(const ChainKernel& kernel, const Args& a) {
    if (!a.table_path.empty())
        return kernel.index_of(load_table_file(a.table_path));
    if (a.start < 0 || static_cast<std::size_t>(a.start) >= kernel.size())
        throw std::invalid_argument("start state index out of range (space has " +
                                    std::to_string(kernel.size()) + " tables)");
    return static_cast<std::size_t>(a.start);
}

void run_enumerate(const Args& a, std::ostream& out) {
    const std::vector<Table> tables = enumerate_tables(a.rows, a.cols);
    if (a.count_only) {
        out << tables.size() << '\n';
        return;
    }
    const std::string fmt = pick_format(a, "text");
    if (fmt == "json") {
        json doc = json::array();
        for (const Table& T : tables)
            doc.push_back(table_json(T));
        out << doc.dump(2) << '\n';
    } else if (fmt == "csv") {
        for (const Table& T : tables)
            out << csv_flat(T) << '\n';
    } else {
        for (std::size_t i = 0; i < tables.size(); ++i) {
            if (i)
                out << '\n';
            print_table(out, tables[i]);
        }
    }
}

void run_pmf(const Args& a, std::ostream& out) {
    const std::vector<Table> tables = enumerate_tables(a.rows, a.cols);
    const std::string fmt = pick_format(a, "text");
    if (fmt == "json") {
        json doc = json::array();
        for (const Table& T : tables) {
            const Rat p = fisher_yates_pmf(T, a.rows, a.cols);
            json entry;
            entry["table"] = table_json(T);
            if (a.exact)
                entry["pmf"] = rat_str(p);
            else
                entry["pmf"] = to_double(p);
            entry["coset_size"] = rat_str(Rat(coset_size(T, a.rows, a.cols)));
            doc.push_back(entry);
        }
        out << doc.dump(2) << '\n';
    } else if (fmt == "csv") {
        out << "index,pmf,coset_size\n";
        for (std::size_t i = 0; i < tables.size(); ++i) {
            const Rat p = fisher_yates_pmf(tables[i], a.rows, a.cols);
            out << i << ',';
            if (a.exact)
                out << rat_str(p);
            else
                out << std::setprecision(17) << to_double(p);
            out << ',' << coset_size(tables[i], a.rows, a.cols) << '\n';
        }
    } else {
        for (std::size_t i = 0; i < tables.size(); ++i) {
            const Rat p = fisher_yates_pmf(tables[i], a.rows, a.cols);
            out << "table " << i << ": [" << table_inline(tables[i]) << "]  pi = ";
            if (a.exact)
                out << rat_str(p);
            else
                out << std::setprecision(12) << to_double(p);
            out << "  coset size = " << coset_size(tables[i], a.rows, a.cols)
                << '\n';
        }
    }
}

void run_sample(const Args& a, std::ostream& out) {
    if (a.n_samples < 1)
        throw std::invalid_argument("sample count must be positive");
    SplitMix64 rng(a.seed);
    const std::string fmt = pick_format(a, "text");
    json doc = json::array();
    for (long long s = 0; s < a.n_samples; ++s) {
        const Table T = sample_fisher_yates(a.rows, a.cols, rng);
        if (fmt == "json") {
            doc.push_back(table_json(T));
        } else if (fmt == "csv") {
            out << s << ',' << csv_flat(T) << '\n';
        } else {
            if (s)
                out << '\n';
            print_table(out, T);
        }
    }
    if (fmt == "json")
        out << doc.dump(2) << '\n';
}

void run_spectrum(const Args& a, std::ostream& out) {
    const Spectrum sp = spectrum(a.rows, a.cols);
    const std::string fmt = pick_format(a, "json");
    if (fmt == "json") {
        json doc = json::array();
        for (const SpectrumEntry& e : sp) {
            json entry;
            entry["partition"] = e.rho;
            entry["beta"] = {{"fraction", rat_str(e.value)},
                             {"value", to_double(e.value)}};
            entry["multiplicity"] = e.multiplicity;
            doc.push_back(entry);
        }
        out << doc.dump(2) << '\n';
    } else if (fmt == "csv") {
        out << "partition,beta_fraction,beta,multiplicity\n";
        for (const SpectrumEntry& e : sp) {
            for (std::size_t i = 0; i < e.rho.size(); ++i)
                out << (i ? " " : "") << e.rho[i];
            out << ',' << rat_str(e.value) << ',' << std::setprecision(17)
                << to_double(e.value) << ',' << e.multiplicity << '\n';
        }
    } else {
        for (const SpectrumEntry& e : sp)
            out << std::left << std::setw(16) << partition_str(e.rho)
                << std::setw(12) << rat_str(e.value) << std::setprecision(12)
                << to_double(e.value) << "  x" << e.multiplicity << '\n';
    }
}

void run_evolve(const Args& a, std::ostream& out) {
    if (a.t < 0)
        throw std::invalid_argument("step count must be non-negative");
    const ChainKernel kernel(kernel_by_name(a.chain), a.rows, a.cols);
    std::vector<Rat> p(kernel.size(), Rat(0));
    p[start_state(kernel, a)] = 1;
    p = evolve_distribution(kernel, p, a.t);
    const std::string fmt = pick_format(a, "csv");
    if (fmt == "json") {
        json doc = json::array();
        for (std::size_t x = 0; x < p.size(); ++x) {
            json entry;
            entry["state"] = x;
            entry["table"] = table_json(kernel.states()[x]);
            if (a.exact)
                entry["probability"] = rat_str(p[x]);
            else
                entry["probability"] = to_double(p[x]);
            doc.push_back(entry);
        }
        out << doc.dump(2) << '\n';
    } else if (fmt == "text") {
        for (std::size_t x = 0; x < p.size(); ++x) {
            out << "state " << x << ": [" << table_inline(kernel.states()[x])
                << "]  p = ";
            if (a.exact)
                out << rat_str(p[x]);
            else
                out << std::setprecision(12) << to_double(p[x]);
            out << '\n';
        }
    } else {
        out << "state,probability\n";
        for (std::size_t x = 0; x < p.size(); ++x) {
            out << x << ',';
            if (a.exact)
                out << rat_str(p[x]);
            else
                out << std::setprecision(17) << to_double(p[x]);
            out << '\n';
        }
    }
}

void run_mix(const Args& a, std::ostream& out) {
    if (a.t_max < 0)
        throw std::invalid_argument("t-max must be non-negative");
    const ChainKernel kernel(kernel_by_name(a.chain), a.rows, a.cols);
    Args with_default = a;
    if (a.table_path.empty() && a.start < 0)
        with_default.start = 0;
    const std::size_t x0 = start_state(kernel, with_default);
    const MixProfile prof = mix_profile(kernel, x0, a.t_max);
    const std::string fmt = pick_format(a, "csv");
    if (fmt == "json") {
        json doc;
        doc["start"] = x0;
        doc["exact_until"] = prof.exact_until;
        json rows = json::array();
        for (const DistanceProfile& r : prof.rows)
            rows.push_back({{"t", r.t},
                            {"tv", r.tv},
                            {"chi2", r.chi2},
                            {"bound", r.bound}});
        doc["rows"] = rows;
        out << doc.dump(2) << '\n';
    } else if (fmt == "text") {
        out << std::left << std::setw(8) << "t" << std::setw(16) << "tv"
            << std::setw(16) << "chi2" << "bound\n";
        for (const DistanceProfile& r : prof.rows)
            out << std::left << std::setw(8) << r.t << std::setprecision(8)
                << std::setw(16) << r.tv << std::setw(16) << r.chi2 << r.bound
                << '\n';
    } else {
        out << "t,tv,chi2,bound\n";
        for (const DistanceProfile& r : prof.rows)
            out << r.t << ',' << std::setprecision(17) << r.tv << ',' << r.chi2
                << ',' << r.bound << '\n';
    }
}

void run_wilson(const Args& a, std::ostream& out) {
    std::size_t i = 0, j = 0;
    if (!a.cell.empty()) {
        if (a.cell.size() != 2 || a.cell[0] < 0 || a.cell[1] < 0)
            throw std::invalid_argument("--cell expects two non-negative indices i,j");
        i = static_cast<std::size_t>(a.cell[0]);
        j = static_cast<std::size_t>(a.cell[1]);
    }
    const WilsonBound wb = wilson_lower_bound(a.rows, a.cols, i, j, a.c);
    const std::string fmt = pick_format(a, "text");
    if (fmt == "json") {
        json doc;
        doc["cell"] = {i, j};
        doc["c"] = a.c;
        doc["case"] = wb.case_fired;
        doc["argument"] = wb.argument;
        doc["degenerate"] = wb.degenerate;
        doc["t_lower"] = wb.t_lower;
        out << doc.dump(2) << '\n';
    } else {
        out << "cell: (" << i << "," << j << ")\n"
            << "variance case: " << wb.case_fired << '\n'
            << std::setprecision(12) << "log argument: " << wb.argument << '\n';
        if (wb.degenerate)
            out << "degenerate (argument or prescribed time not positive); "
                   "lower bound clamps to 0\n";
        out << "mixing-time lower bound: t_mix(1/4) >= " << wb.t_lower << '\n';
    }
}

void run_bounds(const Args& a, std::ostream& out) {
    if (a.rows.size() != 2)
        throw std::invalid_argument(
            "bounds needs two-row margins (n-k,k); got " +
            std::to_string(a.rows.size()) + " rows");
    const long long k = std::min(a.rows[0], a.rows[1]);
    const long long n = a.rows[0] + a.rows[1];
    json doc;
    std::ostringstream text;
    text << std::setprecision(12);

    if (a.cols.size() == 2) {
        const long long l = std::min<long long>(a.cols[0], a.cols[1]);
        const long long lo = std::min(k, l), hi = std::max(k, l);
        const PrescribedBound up =
            avg_chi2_bound(lo, hi, n, a.c, BoundSide::Upper);
        const PrescribedBound down =
            avg_chi2_bound(lo, hi, n, a.c, BoundSide::Lower);
        doc["average"] = {{"k", lo},
                          {"l", hi},
                          {"upper", {{"t", up.t}, {"bound", up.bound}}},
                          {"lower", {{"t", down.t}, {"bound", down.bound}}}};
        text << "average chi-square (k = " << lo << ", l = " << hi << "):\n"
             << "  <= " << up.bound << " once t >= " << up.t << '\n'
             << "  >= " << down.bound << " while t <= " << down.t << '\n';
    }

    json cols_doc = json::array();
    bool any_column = false;
    for (std::size_t j = 0; j < a.cols.size(); ++j) {
        if (a.col_index >= 0 && static_cast<std::size_t>(a.col_index) != j)
            continue;
        if (a.cols[j] <= k) {
            if (a.col_index >= 0)
                throw std::invalid_argument(
                    "extreme state does not exist: column margin must exceed k");
            continue;
        }
        const ExtremeStateBounds esb = extreme_state_bounds(k, a.cols, j, a.c);
        any_column = true;
        cols_doc.push_back({{"column", j},
                            {"margin", a.cols[j]},
                            {"t_upper", esb.t_upper},
                            {"t_lower", esb.t_lower}});
        text << "extreme state " << k << "*e_" << j << " (margin " << a.cols[j]
             << "):\n"
             << "  chi-square <= e^-c once t >= " << esb.t_upper << '\n'
             << "  chi-square >= e^c  while t <= " << esb.t_lower << '\n';
    }
    doc["columns"] = cols_doc;

    if (!any_column && !doc.contains("average"))
        throw std::invalid_argument(
            "no bound applies: need two-column margins or a column margin "
            "above k");

    const std::string fmt = pick_format(a, "text");
    if (fmt == "json")
        out << doc.dump(2) << '\n';
    else
        out << text.str();
}

void run_compare(const Args& a, std::ostream& out) {
    const RelaxationReport rep = relaxation_comparison(a.rows, a.cols);
    const std::string fmt = pick_format(a, "text");
    if (fmt == "json") {
        json doc;
        doc["states"] = rep.states;
        doc["total"] = rep.total;
        doc["min_positive_entry"] = rep.min_positive_entry;
        doc["max_entry"] = rep.max_entry;
        doc["single_state"] = rep.single_state;
        json chains = json::array();
        for (const ChainRelaxation& c : rep.chains)
            chains.push_back({{"chain", kernel_name(c.kind)},
                              {"second_eigenvalue", c.second_eigenvalue},
                              {"min_eigenvalue", c.min_eigenvalue},
                              {"gap", c.gap},
                              {"abs_gap", c.abs_gap},
                              {"relaxation", c.relaxation}});
        doc["chains"] = chains;
        doc["uniform_bounds"] = {{"lower", rep.uniform_lower},
                                 {"upper", rep.uniform_upper},
                                 {"ok", rep.uniform_ok}};
        doc["fisher_yates_bounds"] = {{"lower", rep.fy_lower},
                                      {"upper", rep.fy_upper},
                                      {"ok", rep.fy_ok}};
        out << doc.dump(2) << '\n';
        return;
    }
    out << rep.states << " tables (" << rep.n_rows << " x " << rep.n_cols
        << ", n = " << rep.total << "), min positive entry m = "
        << rep.min_positive_entry << ", max entry M = " << rep.max_entry
        << '\n';
    if (rep.single_state) {
        out << "single table: every chain is already stationary\n";
        return;
    }
    out << std::left << std::setw(20) << "chain" << std::setw(14) << "2nd eig"
        << std::setw(14) << "min eig" << std::setw(14) << "abs gap"
        << "relaxation\n";
    for (const ChainRelaxation& c : rep.chains)
        out << std::left << std::setw(20) << kernel_name(c.kind)
            << std::setprecision(6) << std::setw(14) << c.second_eigenvalue
            << std::setw(14) << c.min_eigenvalue << std::setw(14) << c.abs_gap
            << c.relaxation << '\n';
    out << std::setprecision(6) << "uniform-swap relaxation in ["
        << rep.uniform_lower << ", " << rep.uniform_upper << "]: "
        << (rep.uniform_ok ? "holds" : "VIOLATED") << '\n'
        << "transposition-chain relaxation in [" << rep.fy_lower << ", "
        << rep.fy_upper << "]: " << (rep.fy_ok ? "holds" : "VIOLATED") << '\n';
}

void append_matrix(std::ostream& out, const std::vector<std::vector<double>>& m) {
    for (const auto& row : m) {
        for (double v : row)
            out << std::setw(9) << std::fixed << std::setprecision(3) << v;
        out << '\n';
    }
    out.unsetf(std::ios_base::floatfield);
}

void run_analyze(const Args& a, std::ostream& out) {
    Table T;
    std::string label;
    if (!a.dataset.empty()) {
        const Dataset d = builtin_dataset(a.dataset);
        T = d.table;
        label = d.name + " (" + d.note + ")";
    } else {
        T = load_table_file(a.table_path);
        label = a.table_path;
    }
    const Margins rows = row_margins(T), cols = col_margins(T);
    const long long n = partition_sum(rows);
    const long long df = static_cast<long long>(rows.size() - 1) *
                         static_cast<long long>(cols.size() - 1);
    const Rat stat = chi_square_statistic(T);
    const double p_value = chi_square_pvalue(to_double(stat), df);
    const Chi2Decomposition parts = chi2_decomposition(T);
    const auto pearson = pearson_residuals(T);
    const auto normalized = normalized_residuals(T);

    std::vector<PanelEntry> panel;
    if (a.panel) {
        PanelOptions options;
        options.samples = a.panel_samples;
        options.seed = a.seed;
        panel = quadratic_residual_panel(T, options);
    }

    const std::string fmt = pick_format(a, "text");
    if (fmt == "json") {
        json doc;
        doc["table"] = label;
        doc["rows"] = rows;
        doc["cols"] = cols;
        doc["n"] = n;
        doc["df"] = df;
        doc["chi_square"] = {{"value", to_double(stat)},
                             {"fraction", rat_str(stat)}};
        doc["p_value"] = p_value;
        doc["decomposition"] = {{"quadratic", to_double(parts.quadratic)},
                                {"linear", to_double(parts.linear)},
                                {"constant", to_double(parts.constant)}};
        doc["pearson_residuals"] = pearson;
        doc["normalized_residuals"] = normalized;
        if (a.panel) {
            json entries = json::array();
            for (const PanelEntry& e : panel)
                entries.push_back({{"cells", {e.i, e.j, e.k, e.l}},
                                   {"value", e.value},
                                   {"variance", e.variance},
                                   {"exact_variance", e.exact_variance},
                                   {"variance_ci",
                                    {e.variance_ci_low, e.variance_ci_high}}});
            doc["quadratic_panel"] = entries;
        }
        out << doc.dump(2) << '\n';
        return;
    }

    out << "table: " << label << '\n'
        << "size: " << rows.size() << " x " << cols.size() << ", n = " << n
        << '\n'
        << std::setprecision(10) << "chi-square statistic: " << to_double(stat)
        << "  (df = " << df << ", p-value = " << std::setprecision(6) << p_value
        << ")\n"
        << std::setprecision(10) << "eigenfunction split: quadratic "
        << to_double(parts.quadratic) << "  linear " << to_double(parts.linear)
        << "  constant " << to_double(parts.constant) << '\n';
    out << "\npearson residuals (T - E) / sqrt(E):\n";
    append_matrix(out, pearson);
    out << "\nunit-variance residuals (T - E) / sd(T):\n";
    append_matrix(out, normalized);
    if (a.panel) {
        out << "\nnormalized quadratic residuals f(T) / sd(f) ("
            << (panel.empty() || panel.front().exact_variance ? "exact"
                                                              : "sampled")
            << " variances):\n";
        for (const PanelEntry& e : panel) {
            out << "  (" << e.i << ',' << e.j << ")x(" << e.k << ',' << e.l
                << ")  " << std::setw(9) << std::fixed << std::setprecision(3)
                << e.value;
            out.unsetf(std::ios_base::floatfield);
            if (!e.exact_variance)
                out << "   variance " << std::setprecision(4) << e.variance
                    << " in [" << e.variance_ci_low << ", "
                    << e.variance_ci_high << "]";
            out << '\n';
        }
    }
}

void run_three_way(const Args& a, std::ostream& out) {
    const Table3Space space(a.rows, a.cols, a.slabs);
    if (a.count_only) {
        out << space.size() << '\n';
        return;
    }
    const std::string fmt = pick_format(a, "text");
    json doc;
    doc["tables"] = space.size();

    std::string balance;
    if (a.check) {
        // pi is proportional to 1/prod T_ijk!; detailed balance requires
        // p(T,S)/prod S! == p(S,T)/prod T! for every move, exactly.
        for (std::size_t idx = 0; idx < space.size(); ++idx) {
            const Table3 T = space.table(idx);
            const Table3Row row = three_way_row(T);
            Rat total = row.holding;
            for (const auto& [S, p] : row.moves) {
                total += p;
                const Table3Row back = three_way_row(S);
                Rat reverse = 0;
                for (const auto& [back_table, q] : back.moves)
                    if (back_table == T) {
                        reverse = q;
                        break;
                    }
                if (p * Rat(factorial_product3(S)) !=
                    reverse * Rat(factorial_product3(T)))
                    throw std::runtime_error(
                        "detailed balance violated at state " +
                        std::to_string(idx));
            }
            if (total != Rat(1))
                throw std::runtime_error("kernel row does not sum to 1 at state " +
                                         std::to_string(idx));
        }
        balance = "exact over " + std::to_string(space.size()) + " states";
        doc["detailed_balance"] = balance;
    }

    if (fmt == "json") {
        out << doc.dump(2) << '\n';
    } else {
        out << "tables: " << space.size() << '\n';
        if (a.check)
            out << "detailed balance: " << balance << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random transpositions on contingency tables: exact chains, "
                 "spectra, mixing bounds, and residual analysis"};
    app.require_subcommand(1);
    Args a;

    const auto add_margins = [&](CLI::App* sub, bool slabs = false) {
        sub->add_option("--rows", a.rows, "row margins, comma separated")
            ->required()
            ->delimiter(',');
        sub->add_option("--cols", a.cols, "column margins, comma separated")
            ->required()
            ->delimiter(',');
        if (slabs)
            sub->add_option("--slabs", a.slabs,
                            "third-axis margins, comma separated")
                ->required()
                ->delimiter(',');
    };
    const auto add_output = [&](CLI::App* sub, const char* natural) {
        sub->add_option("--format", a.format,
                        std::string("output format (default ") + natural + ")")
            ->check(CLI::IsMember({"text", "json", "csv"}));
        sub->add_option("--out", a.out_path, "write output to a file");
    };
    const auto add_chain = [&](CLI::App* sub) {
        sub->add_option("--chain", a.chain,
                        "kernel: rt | rt-no-holding | uniform-swap | "
                        "metropolis-uniform | metropolis-fy");
    };
    const auto add_start = [&](CLI::App* sub) {
        sub->add_option("--table", a.table_path,
                        "start table file (.json or .csv)");
        sub->add_option("--start", a.start, "start state index");
    };

    CLI::App* enumerate = app.add_subcommand(
        "enumerate", "list all tables with the given margins");
    add_margins(enumerate);
    add_output(enumerate, "text");
    enumerate->add_flag("--count-only", a.count_only, "print only the count");

    CLI::App* pmf = app.add_subcommand(
        "pmf", "stationary probability and coset size of every table");
    add_margins(pmf);
    add_output(pmf, "text");
    pmf->add_flag("--exact", a.exact, "print probabilities as fractions");

    CLI::App* sample =
        app.add_subcommand("sample", "draw tables from the stationary law");
    add_margins(sample);
    add_output(sample, "text");
    sample->add_option("--n", a.n_samples, "number of samples (default 1)");
    sample->add_option("--seed", a.seed, "RNG seed (default 0)");

    CLI::App* spectrum_cmd = app.add_subcommand(
        "spectrum", "eigenvalues with multiplicities, indexed by partitions");
    add_margins(spectrum_cmd);
    add_output(spectrum_cmd, "json");

    CLI::App* evolve = app.add_subcommand(
        "evolve", "exact distribution after t steps from a start table");
    add_margins(evolve);
    add_output(evolve, "csv");
    add_chain(evolve);
    add_start(evolve);
    evolve->add_option("--t", a.t, "number of steps (default 1)");
    evolve->add_flag("--exact", a.exact, "print probabilities as fractions");

    CLI::App* mix = app.add_subcommand(
        "mix", "TV/chi-square decay profile from a start table");
    add_margins(mix);
    add_output(mix, "csv");
    add_chain(mix);
    add_start(mix);
    mix->add_option("--t-max", a.t_max, "profile horizon (default 20)");

    CLI::App* wilson = app.add_subcommand(
        "wilson", "eigenfunction lower bound on the mixing time");
    add_margins(wilson);
    add_output(wilson, "text");
    wilson->add_option("--cell", a.cell, "cell i,j carrying the eigenfunction")
        ->delimiter(',');
    wilson->add_option("--c", a.c, "slack parameter (default 1)");

    CLI::App* bounds = app.add_subcommand(
        "bounds", "closed-form chi-square decay windows for two-row margins");
    add_margins(bounds);
    add_output(bounds, "text");
    bounds->add_option("--c", a.c, "slack parameter (default 1)");
    bounds->add_option("--j", a.col_index,
                       "single column index for the extreme state");

    CLI::App* compare = app.add_subcommand(
        "compare", "relaxation times of the four chains with comparison bounds");
    add_margins(compare);
    add_output(compare, "text");

    CLI::App* analyze = app.add_subcommand(
        "analyze", "residuals, chi-square split and p-value for an observed table");
    analyze->add_option("--data", a.dataset,
                        "bundled dataset: midtown | victoria | hair_eye");
    analyze->add_option("--table", a.table_path, "table file (.json or .csv)");
    add_output(analyze, "text");
    analyze->add_flag("--panel", a.panel, "include the quadratic residual panel");
    analyze->add_option("--samples", a.panel_samples,
                        "panel samples when enumeration is infeasible");
    analyze->add_option("--seed", a.seed, "RNG seed for the sampled panel");

    CLI::App* three_way = app.add_subcommand(
        "three-way", "enumerate the three-margin table space");
    add_margins(three_way, /*slabs=*/true);
    add_output(three_way, "text");
    three_way->add_flag("--count-only", a.count_only, "print only the count");
    three_way->add_flag("--check", a.check,
                        "verify detailed balance of the chain exactly");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    // Usage-level cross-option checks that CLI11 cannot express.
    if (evolve->parsed() && a.table_path.empty() && a.start < 0) {
        std::cerr << "evolve: exactly one of --table or --start is required\n";
        return 2;
    }
    if (analyze->parsed() && (a.dataset.empty() == a.table_path.empty())) {
        std::cerr << "analyze: exactly one of --data or --table is required\n";
        return 2;
    }

    try {
        Sink sink;
        sink.open(a.out_path);
        std::ostream& out = sink.out();
        if (enumerate->parsed())
            run_enumerate(a, out);
        else if (pmf->parsed())
            run_pmf(a, out);
        else if (sample->parsed())
            run_sample(a, out);
        else if (spectrum_cmd->parsed())
            run_spectrum(a, out);
        else if (evolve->parsed())
            run_evolve(a, out);
        else if (mix->parsed())
            run_mix(a, out);
        else if (wilson->parsed())
            run_wilson(a, out);
        else if (bounds->parsed())
            run_bounds(a, out);
        else if (compare->parsed())
            run_compare(a, out);
        else if (analyze->parsed())
            run_analyze(a, out);
        else if (three_way->parsed())
            run_three_way(a, out);
        out.flush();
        if (!out)
            throw std::runtime_error("output stream failed");
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
