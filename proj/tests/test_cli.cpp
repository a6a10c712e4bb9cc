// End-to-end checks of the command-line binary: every subcommand is a thin
// adapter, so outputs are compared against direct library calls, and the
// documented exit-code contract (0 ok, 1 computation error, 2 usage error)
// is pinned.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "coset_chains/mixing.hpp"
#include "coset_chains/spectral.hpp"
#include "coset_chains/table.hpp"

using namespace coset_chains;
using json = nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr combined
};

RunResult run_cli(const std::string& args) {
    const std::string capture = "cli_capture.tmp";
    const std::string cmd =
        std::string(COSET_CHAINS_CLI_PATH) + " " + args + " > " + capture + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(capture);
    std::ostringstream text;
    text << in.rdbuf();
    result.output = text.str();
    std::remove(capture.c_str());
    return result;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("spectrum subcommand emits the library spectrum as JSON") {
    const RunResult r = run_cli("spectrum --rows 3,1,1 --cols 2,2,1");
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.output);
    const Spectrum expected = spectrum({3, 1, 1}, {2, 2, 1});
    REQUIRE(doc.size() == expected.size());
    REQUIRE(doc.size() == 4);
    for (std::size_t k = 0; k < expected.size(); ++k) {
        CHECK(doc[k]["partition"].get<std::vector<int>>() == expected[k].rho);
        CHECK(doc[k]["beta"]["value"].get<double>() ==
              to_double(expected[k].value));
        CHECK(doc[k]["multiplicity"].get<long long>() ==
              expected[k].multiplicity);
    }
    CHECK(doc[1]["beta"]["fraction"] == "3/5");
    CHECK(doc[1]["multiplicity"] == 4);
    CHECK(doc[2]["beta"]["fraction"] == "9/25");
    CHECK(doc[3]["beta"]["fraction"] == "1/5");
}

TEST_CASE("enumerate subcommand counts and lists the table space") {
    const RunResult count = run_cli("enumerate --rows 3,2 --cols 2,2,1 --count-only");
    CHECK(count.exit_code == 0);
    CHECK(count.output == "5\n");

    const RunResult listed =
        run_cli("enumerate --rows 3,2 --cols 2,2,1 --format json");
    REQUIRE(listed.exit_code == 0);
    const json doc = json::parse(listed.output);
    const std::vector<Table> expected = enumerate_tables({3, 2}, {2, 2, 1});
    REQUIRE(doc.size() == expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k)
        CHECK(doc[k].get<Table>() == expected[k]);
}

TEST_CASE("sample subcommand replays deterministically under a fixed seed") {
    const std::string args = "sample --rows 3,2 --cols 2,2,1 --n 5 --seed 7";
    const RunResult first = run_cli(args);
    const RunResult second = run_cli(args);
    CHECK(first.exit_code == 0);
    REQUIRE_FALSE(first.output.empty());
    CHECK(first.output == second.output);

    const RunResult other =
        run_cli("sample --rows 3,2 --cols 2,2,1 --n 12 --seed 8");
    CHECK(other.exit_code == 0);
    const RunResult other12 =
        run_cli("sample --rows 3,2 --cols 2,2,1 --n 12 --seed 7");
    CHECK(other.output != other12.output);
}

TEST_CASE("pmf subcommand reports exact probabilities and coset sizes") {
    const RunResult r = run_cli("pmf --rows 3,2 --cols 2,2,1 --exact");
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.output, "pi = 2/5"));
    CHECK(contains(r.output, "coset size = 48"));
    CHECK(contains(r.output, "coset size = 12"));
    CHECK(contains(r.output, "coset size = 24"));
}

TEST_CASE("evolve subcommand reproduces a point mass at t = 0") {
    const RunResult r =
        run_cli("evolve --rows 3,2 --cols 2,2,1 --start 3 --t 0 --exact");
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.output, "state,probability\n"));
    CHECK(contains(r.output, "\n3,1\n"));
    CHECK(contains(r.output, "\n0,0\n"));
}

TEST_CASE("mix subcommand emits the profile CSV") {
    const RunResult r = run_cli("mix --rows 3,2 --cols 2,2,1 --t-max 5");
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.output, "t,tv,chi2,bound\n"));
    // Start state 0 has pi = 1/5, so the t = 0 row reads tv = 0.8, chi2 = 4.
    CHECK(contains(r.output, "\n0,0.8"));
    int lines = 0;
    for (char ch : r.output)
        lines += (ch == '\n');
    CHECK(lines == 7);  // header + t = 0..5
}

TEST_CASE("wilson subcommand mirrors the library bound") {
    const RunResult r =
        run_cli("wilson --rows 12,4 --cols 12,4 --cell 1,1 --c 0.3 --format json");
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.output);
    const WilsonBound expected = wilson_lower_bound({12, 4}, {12, 4}, 1, 1, 0.3);
    CHECK(doc["case"].get<int>() == expected.case_fired);
    CHECK(doc["argument"].get<double>() == doctest::Approx(expected.argument));
    CHECK(doc["t_lower"].get<double>() == doctest::Approx(expected.t_lower));
    CHECK(doc["degenerate"].get<bool>() == expected.degenerate);
}

TEST_CASE("bounds subcommand mirrors the closed-form decay windows") {
    const RunResult r =
        run_cli("bounds --rows 8,2 --cols 4,3,3 --c 1 --format json");
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.output);
    REQUIRE(doc["columns"].size() == 3);
    for (std::size_t j = 0; j < 3; ++j) {
        const ExtremeStateBounds expected =
            extreme_state_bounds(2, {4, 3, 3}, j, 1.0);
        CHECK(doc["columns"][j]["t_upper"].get<double>() ==
              doctest::Approx(expected.t_upper).epsilon(1e-12));
        CHECK(doc["columns"][j]["t_lower"].get<double>() ==
              doctest::Approx(expected.t_lower).epsilon(1e-12));
    }

    const RunResult avg = run_cli("bounds --rows 6,2 --cols 5,3 --c 1 --format json");
    REQUIRE(avg.exit_code == 0);
    const json avg_doc = json::parse(avg.output);
    const PrescribedBound up = avg_chi2_bound(2, 3, 8, 1.0, BoundSide::Upper);
    CHECK(avg_doc["average"]["upper"]["t"].get<double>() ==
          doctest::Approx(up.t).epsilon(1e-12));
}

TEST_CASE("compare subcommand reports all four chains and verdicts") {
    const RunResult r = run_cli("compare --rows 3,2 --cols 2,2,1");
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.output, "rt"));
    CHECK(contains(r.output, "uniform-swap"));
    CHECK(contains(r.output, "metropolis-uniform"));
    CHECK(contains(r.output, "metropolis-fy"));
    CHECK_FALSE(contains(r.output, "VIOLATED"));
    CHECK(contains(r.output, "holds"));
}

TEST_CASE("analyze subcommand prints the aligned residual report") {
    const RunResult r = run_cli("analyze --data midtown");
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.output, "2.233"));
    CHECK(contains(r.output, "-3.587"));
    CHECK(contains(r.output, "45.98"));
    CHECK(contains(r.output, "df = 15"));

    const RunResult j = run_cli("analyze --data hair_eye --format json");
    REQUIRE(j.exit_code == 0);
    const json doc = json::parse(j.output);
    CHECK(doc["n"] == 592);
    CHECK(doc["df"] == 9);
    CHECK(std::fabs(doc["chi_square"]["value"].get<double>() - 138.29) < 0.01);
}

TEST_CASE("three-way subcommand counts tables and certifies detailed balance") {
    const RunResult count =
        run_cli("three-way --rows 2,1 --cols 2,1 --slabs 1,1,1 --count-only");
    REQUIRE(count.exit_code == 0);
    const Table3Space space({2, 1}, {2, 1}, {1, 1, 1});
    CHECK(count.output == std::to_string(space.size()) + "\n");

    const RunResult checked =
        run_cli("three-way --rows 2,1 --cols 2,1 --slabs 1,1,1 --check");
    REQUIRE(checked.exit_code == 0);
    CHECK(contains(checked.output, "detailed balance: exact"));
}

TEST_CASE("output lands in the file named by --out") {
    const std::string path = "cli_out.tmp";
    const RunResult r = run_cli("enumerate --rows 3,2 --cols 2,2,1 --count-only --out " + path);
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.empty());
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "5");
    in.close();
    std::remove(path.c_str());
}

TEST_CASE("usage errors exit 2 and computation errors exit 1") {
    CHECK(run_cli("").exit_code == 2);                      // missing subcommand
    CHECK(run_cli("enumerate --rows 3,2").exit_code == 2);  // missing --cols
    CHECK(run_cli("frobnicate").exit_code == 2);            // unknown subcommand
    CHECK(run_cli("evolve --rows 3,2 --cols 2,2,1 --t 1").exit_code == 2);
    CHECK(run_cli("analyze").exit_code == 2);
    CHECK(run_cli("--help").exit_code == 0);

    const RunResult mismatch = run_cli("enumerate --rows 3,2 --cols 2,2");
    CHECK(mismatch.exit_code == 1);
    CHECK(contains(mismatch.output, "equal sums"));

    const RunResult unknown_data = run_cli("analyze --data nope");
    CHECK(unknown_data.exit_code == 1);
    CHECK(contains(unknown_data.output, "unknown dataset"));

    const RunResult bad_start =
        run_cli("evolve --rows 3,2 --cols 2,2,1 --start 99 --t 1");
    CHECK(bad_start.exit_code == 1);
    CHECK(contains(bad_start.output, "out of range"));
}

TEST_CASE("table files feed state-specific subcommands") {
    const std::string path = "cli_table.csv";
    {
        std::ofstream out(path);
        out << "1,1,1\n1,1,0\n";
    }
    const RunResult r =
        run_cli("evolve --rows 3,2 --cols 2,2,1 --table " + path + " --t 0 --exact");
    REQUIRE(r.exit_code == 0);
    // [[1,1,1],[1,1,0]] is state index 3 in the enumeration order.
    CHECK(contains(r.output, "\n3,1\n"));
    std::remove(path.c_str());
}
