#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "coset_chains/chains.hpp"
#include "coset_chains/eigenfunctions.hpp"
#include "coset_chains/partition.hpp"
#include "coset_chains/spectral.hpp"
#include "coset_chains/table.hpp"

using namespace coset_chains;

namespace {

// Exact rank of a rational matrix by Gaussian elimination.
std::size_t rat_rank(std::vector<std::vector<Rat>> A) {
    if (A.empty()) return 0;
    const std::size_t rows = A.size(), cols = A[0].size();
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t sel = rank;
        while (sel < rows && A[sel][col] == 0) ++sel;
        if (sel == rows) continue;
        std::swap(A[sel], A[rank]);
        for (std::size_t r = rank + 1; r < rows; ++r) {
            if (A[r][col] == 0) continue;
            const Rat f = A[r][col] / A[rank][col];
            for (std::size_t c = col; c < cols; ++c) A[r][c] -= f * A[rank][c];
        }
        ++rank;
    }
    return rank;
}

// Exact coefficients of the interpolating polynomial through (x, v) points.
std::vector<Rat> fit_polynomial(const std::vector<std::pair<long, Rat>>& pts) {
    const std::size_t d = pts.size();
    std::vector<std::vector<Rat>> A(d, std::vector<Rat>(d + 1));
    for (std::size_t i = 0; i < d; ++i) {
        Rat power = 1;
        for (std::size_t j = 0; j < d; ++j) {
            A[i][j] = power;
            power *= pts[i].first;
        }
        A[i][d] = pts[i].second;
    }
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t sel = col;
        while (A[sel][col] == 0) ++sel;
        std::swap(A[sel], A[col]);
        for (std::size_t r = 0; r < d; ++r) {
            if (r == col || A[r][col] == 0) continue;
            const Rat f = A[r][col] / A[col][col];
            for (std::size_t c = col; c <= d; ++c) A[r][c] -= f * A[col][c];
        }
    }
    std::vector<Rat> coeff(d);
    for (std::size_t i = 0; i < d; ++i) coeff[i] = A[i][d] / A[i][i];
    return coeff;
}

// Check sum_y P(x, y) f(y) == eigenvalue * f(x) on every state of the chain.
void check_eigen_identity(const CellPolynomial& poly, const ChainKernel& kernel) {
    std::vector<Rat> value(kernel.size());
    for (std::size_t s = 0; s < kernel.size(); ++s)
        value[s] = evaluate(poly, kernel.states()[s]);
    for (std::size_t s = 0; s < kernel.size(); ++s) {
        Rat lhs = 0;
        for (const auto& [t, p] : kernel.row(s)) lhs += p * value[t];
        CHECK(lhs == poly.eigenvalue * value[s]);
    }
}

void check_all_eigen_identities(const Margins& lambda, const Margins& mu) {
    INFO("I=" << lambda.size() << " J=" << mu.size() << " lambda[0]=" << lambda[0]
              << " mu[0]=" << mu[0]);
    ChainKernel kernel(KernelKind::RandomTranspositions, lambda, mu);
    const std::size_t I = lambda.size(), J = mu.size();
    for (std::size_t i = 0; i < I; ++i)
        for (std::size_t j = 0; j < J; ++j)
            check_eigen_identity(linear_f(lambda, mu, i, j), kernel);
    for (std::size_t a = 0; a < I * J; ++a)
        for (std::size_t b = a; b < I * J; ++b)
            check_eigen_identity(
                quadratic_f(lambda, mu, a / J, a % J, b / J, b % J), kernel);
}

const Margins kRows = {3, 2};
const Margins kCols = {2, 2, 1};

} // namespace

TEST_CASE("linear eigenfunction values") {
    const CellPolynomial f = linear_f(kRows, kCols, 0, 0);
    CHECK(f.kind == PolyKind::Linear);
    CHECK(f.eigenvalue == Rat(3, 5));
    CHECK(f.note.empty());
    CHECK(evaluate(f, {{2, 1, 0}, {0, 1, 1}}) == Rat(4, 5));
    CHECK(evaluate(f, {{1, 2, 0}, {1, 0, 1}}) == -Rat(1, 5));

    // When the stationary mean lambda_i mu_j / n is integral, the function
    // vanishes at tables attaining it.
    const CellPolynomial g = linear_f({2, 2}, {2, 2}, 0, 0);
    CHECK(evaluate(g, {{1, 1}, {1, 1}}) == 0);

    CHECK_THROWS_AS(linear_f(kRows, kCols, 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(linear_f(kRows, {2, 2}, 0, 0), std::invalid_argument);
}

TEST_CASE("one-step conditional mean of a single entry") {
    const auto tables = enumerate_tables(kRows, kCols);
    for (const auto& T : tables)
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                const TableRow row = rt_row(T);
                Rat mean = row.holding * T[i][j];
                for (const auto& [to, p] : row.moves) mean += p * to[i][j];
                CHECK(mean == Rat(T[i][j]) * Rat(3, 5) +
                                  Rat(2LL * kRows[i] * kCols[j], 25));
                CHECK(mean == moment_degree_recursion(kRows, kCols, i, j, 1, T));
            }
}

TEST_CASE("linear family spans the second eigenspace") {
    for (int n = 2; n <= 6; ++n) {
        const auto parts = partitions_of(n);
        for (const auto& lambda : parts)
            for (const auto& mu : parts) {
                const auto tables = enumerate_tables(lambda, mu);
                const std::size_t I = lambda.size(), J = mu.size();
                if (I < 2 || J < 2) continue;
                std::vector<std::vector<Rat>> M(tables.size());
                for (std::size_t s = 0; s < tables.size(); ++s)
                    for (std::size_t i = 0; i + 1 < I; ++i)
                        for (std::size_t j = 0; j + 1 < J; ++j)
                            M[s].push_back(
                                evaluate(linear_f(lambda, mu, i, j), tables[s]));
                CHECK(rat_rank(std::move(M)) == (I - 1) * (J - 1));
            }
    }

    // The numerical eigensolver sees the same dimension at 1 - 2/n.
    ChainKernel kernel(KernelKind::RandomTranspositions, {3, 1, 1}, {2, 2, 1});
    std::size_t close_count = 0;
    for (double v : brute_force_spectrum(kernel))
        if (std::abs(v - 0.6) < 1e-8) ++close_count;
    CHECK(close_count == 4);
}

TEST_CASE("conditional product moments match enumeration") {
    for (const auto& [lambda, mu] : std::vector<std::pair<Margins, Margins>>{
             {{3, 2}, {2, 2, 1}}, {{2, 2}, {2, 1, 1}}, {{4, 2}, {3, 3}},
             {{2, 2, 2}, {3, 2, 1}}}) {
        const std::size_t I = lambda.size(), J = mu.size();
        for (const auto& T : enumerate_tables(lambda, mu)) {
            const TableRow row = rt_row(T);
            for (std::size_t a = 0; a < I * J; ++a)
                for (std::size_t b = a; b < I * J; ++b) {
                    const std::size_t i = a / J, j = a % J, k = b / J, l = b % J;
                    Rat mean = row.holding * T[i][j] * T[k][l];
                    for (const auto& [to, p] : row.moves)
                        mean += p * to[i][j] * to[k][l];
                    CHECK(mean == second_moment_step(lambda, mu, i, j, k, l, T));
                }
        }
    }

    // A one-state space cannot move, so the moment is the plain product.
    CHECK(second_moment_step({3}, {3}, 0, 0, 0, 0, {{3}}) == 9);
    CHECK_THROWS_AS(second_moment_step(kRows, kCols, 0, 3, 0, 0, {{2, 1, 0}, {0, 1, 1}}),
                    std::invalid_argument);
}

TEST_CASE("quadratic eigenfunctions certify their eigenvalue") {
    ChainKernel kernel(KernelKind::RandomTranspositions, kRows, kCols);
    for (std::size_t a = 0; a < 6; ++a)
        for (std::size_t b = a; b < 6; ++b) {
            const CellPolynomial f =
                quadratic_f(kRows, kCols, a / 3, a % 3, b / 3, b % 3);
            CHECK(f.eigenvalue == Rat(9, 25));
            check_eigen_identity(f, kernel);
        }
    for (long n = 4; n <= 12; ++n)
        CHECK(1 - Rat(4, n) + Rat(4, n * n) == beta_two_row(2, n));
    CHECK_THROWS_AS(quadratic_f({1, 1}, {1, 1}, 0, 0, 1, 1), std::invalid_argument);
}

TEST_CASE("quadratic closed forms and the corrected pairing") {
    const auto coeff_of = [](const CellPolynomial& f,
                             std::vector<std::pair<std::size_t, std::size_t>> cells) {
        std::sort(cells.begin(), cells.end());
        for (const auto& term : f.terms)
            if (term.cells == cells) return term.coeff;
        return Rat(0);
    };

    // Same-cell case: both printed coefficients hold.
    const CellPolynomial diag = quadratic_f(kRows, kCols, 0, 0, 0, 0);
    CHECK(diag.kind == PolyKind::QuadDiagonal);
    CHECK(diag.note.empty());
    CHECK(coeff_of(diag, {{0, 0}, {0, 0}}) == 1);
    CHECK(coeff_of(diag, {{0, 0}}) == -Rat(7, 3));  // (2*6-6-4+5)/(n-2)
    CHECK(coeff_of(diag, {}) == 1);  // 6*(1+6-3-2)/(4*3)

    // Disjoint case: printed coefficients hold.
    const CellPolynomial dis = quadratic_f(kRows, kCols, 0, 0, 1, 1);
    CHECK(dis.kind == PolyKind::QuadDisjoint);
    CHECK(dis.note.empty());
    CHECK(coeff_of(dis, {{0, 0}, {1, 1}}) == 1);
    CHECK(coeff_of(dis, {{0, 1}, {1, 0}}) == 1);
    CHECK(coeff_of(dis, {{0, 0}}) == -Rat(4, 3));  // lambda_1 mu_1 / 3
    CHECK(coeff_of(dis, {{1, 1}}) == -2);          // lambda_0 mu_0 / 3
    CHECK(coeff_of(dis, {{0, 1}}) == -Rat(4, 3));  // lambda_1 mu_0 / 3
    CHECK(coeff_of(dis, {{1, 0}}) == -2);          // lambda_0 mu_1 / 3
    CHECK(coeff_of(dis, {}) == 4);                 // 2*3*2*2*2/(4*3)

    // Shared column with unequal row margins: the familiar pairing fails and
    // the solved coefficients attach the opposite row's margin to each entry.
    const CellPolynomial shc = quadratic_f(kRows, kCols, 0, 0, 1, 0);
    CHECK(shc.kind == PolyKind::QuadSharedColumn);
    CHECK(!shc.note.empty());
    CHECK(coeff_of(shc, {{0, 0}}) == -Rat(2, 3));  // lambda_1 (mu_0 - 1)/(n-2)
    CHECK(coeff_of(shc, {{1, 0}}) == -1);          // lambda_0 (mu_0 - 1)/(n-2)
    CHECK(coeff_of(shc, {}) == Rat(1, 1));         // 3*2*2*1/(4*3)

    // ... and the swapped variant really is not an eigenfunction here.
    CellPolynomial swapped = shc;
    for (auto& term : swapped.terms) {
        if (term.cells == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}})
            term.coeff = -1;
        if (term.cells == std::vector<std::pair<std::size_t, std::size_t>>{{1, 0}})
            term.coeff = -Rat(2, 3);
    }
    ChainKernel kernel(KernelKind::RandomTranspositions, kRows, kCols);
    bool violated = false;
    for (std::size_t s = 0; s < kernel.size(); ++s) {
        Rat lhs = 0;
        for (const auto& [t, p] : kernel.row(s))
            lhs += p * evaluate(swapped, kernel.states()[t]);
        if (lhs != swapped.eigenvalue * evaluate(swapped, kernel.states()[s]))
            violated = true;
    }
    CHECK(violated);

    // With equal row margins the two pairings coincide and no note is set.
    const CellPolynomial equal_rows = quadratic_f({2, 2}, {2, 1, 1}, 0, 0, 1, 0);
    CHECK(equal_rows.note.empty());

    // Shared row mirrors the shared-column case through transposition.
    const CellPolynomial shr_eq = quadratic_f(kRows, kCols, 0, 0, 0, 1);
    CHECK(shr_eq.kind == PolyKind::QuadSharedRow);
    CHECK(shr_eq.note.empty());  // mu_0 == mu_1
    const CellPolynomial shr = quadratic_f(kRows, kCols, 0, 0, 0, 2);
    CHECK(!shr.note.empty());  // mu_0 != mu_2
    CHECK(coeff_of(shr, {{0, 0}}) == -Rat(2, 3));  // mu_2 (lambda_0 - 1)/(n-2)
    CHECK(coeff_of(shr, {{0, 2}}) == -Rat(4, 3));  // mu_0 (lambda_0 - 1)/(n-2)

    // Canonicalization: the unordered pair and the column swap give the same
    // polynomial.
    const auto same_terms = [](const CellPolynomial& f, const CellPolynomial& g) {
        REQUIRE(f.terms.size() == g.terms.size());
        for (std::size_t t = 0; t < f.terms.size(); ++t) {
            CHECK(f.terms[t].cells == g.terms[t].cells);
            CHECK(f.terms[t].coeff == g.terms[t].coeff);
        }
    };
    same_terms(quadratic_f(kRows, kCols, 1, 1, 0, 0), dis);
    same_terms(quadratic_f(kRows, kCols, 0, 1, 1, 0), dis);
    same_terms(quadratic_f(kRows, kCols, 1, 0, 0, 0), shc);
}

TEST_CASE("eigenfunctions are mean-zero under the stationary law") {
    for (int n = 3; n <= 6; ++n) {
        const auto parts = partitions_of(n);
        for (const auto& lambda : parts)
            for (const auto& mu : parts) {
                const std::size_t I = lambda.size(), J = mu.size();
                for (std::size_t a = 0; a < I * J; ++a) {
                    CHECK(stationary_mean(linear_f(lambda, mu, a / J, a % J), lambda,
                                          mu) == 0);
                    for (std::size_t b = a; b < I * J; ++b)
                        CHECK(stationary_mean(
                                  quadratic_f(lambda, mu, a / J, a % J, b / J, b % J),
                                  lambda, mu) == 0);
                }
            }
    }

    // Cross-check the closed-moment route against direct enumeration.
    const auto tables = enumerate_tables(kRows, kCols);
    const CellPolynomial f = quadratic_f(kRows, kCols, 0, 0, 1, 1);
    Rat mean = 0;
    for (const auto& T : tables) mean += fisher_yates_pmf(T, kRows, kCols) * evaluate(f, T);
    CHECK(mean == 0);
    CHECK(stationary_mean(f, kRows, kCols) == 0);
}

TEST_CASE("covariance of two disjoint linear eigenfunctions") {
    for (int n = 2; n <= 8; ++n) {
        const auto parts = partitions_of(n);
        for (const auto& lambda : parts)
            for (const auto& mu : parts) {
                const std::size_t I = lambda.size(), J = mu.size();
                if (I < 2 || J < 2) continue;
                for (std::size_t i = 0; i < I; ++i)
                    for (std::size_t k = 0; k < I; ++k)
                        for (std::size_t j = 0; j < J; ++j)
                            for (std::size_t l = 0; l < J; ++l) {
                                if (i == k || j == l) continue;
                                const Rat cov =
                                    cross_moment(lambda, mu, static_cast<int>(i),
                                                 static_cast<int>(j), static_cast<int>(k),
                                                 static_cast<int>(l)) -
                                    expected_entry(lambda, mu, static_cast<int>(i),
                                                   static_cast<int>(j)) *
                                        expected_entry(lambda, mu, static_cast<int>(k),
                                                       static_cast<int>(l));
                                CHECK(cov ==
                                      Rat(static_cast<long long>(lambda[i]) * mu[j],
                                          static_cast<long long>(n) * n) *
                                          Rat(static_cast<long long>(lambda[k]) * mu[l],
                                              n - 1));
                            }
            }
    }

    // Enumeration spot check of the same covariance.
    Rat cov = 0;
    for (const auto& T : enumerate_tables(kRows, kCols))
        cov += fisher_yates_pmf(T, kRows, kCols) *
               evaluate(linear_f(kRows, kCols, 0, 0), T) *
               evaluate(linear_f(kRows, kCols, 1, 1), T);
    CHECK(cov == Rat(3LL * 2 * 2 * 2, 25 * 4));
}

TEST_CASE("entry moment recursion") {
    const auto tables = enumerate_tables(kRows, kCols);
    for (const auto& T : tables)
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                CHECK(moment_degree_recursion(kRows, kCols, i, j, 2, T) ==
                      second_moment_step(kRows, kCols, i, j, i, j, T));
                const TableRow row = rt_row(T);
                for (long m = 1; m <= 4; ++m) {
                    Rat mean = row.holding * rat_pow(Rat(T[i][j]), m);
                    for (const auto& [to, p] : row.moves)
                        mean += p * rat_pow(Rat(to[i][j]), m);
                    CHECK(mean == moment_degree_recursion(kRows, kCols, i, j, m, T));
                }
            }
    CHECK_THROWS_AS(moment_degree_recursion(kRows, kCols, 0, 0, 0, tables[0]),
                    std::invalid_argument);
}

TEST_CASE("moment recursion leading coefficient") {
    // Fit the moment map x -> E[T_1(i,j)^m | x] exactly; its x^m coefficient
    // must be 1 - 2m(n+1-m)/n^2.
    const auto leading = [](const Margins& lambda, const Margins& mu, long m) {
        std::map<long, Rat> by_value;
        for (const auto& T : enumerate_tables(lambda, mu)) {
            const Rat v = moment_degree_recursion(lambda, mu, 0, 0, m, T);
            const auto [it, inserted] = by_value.emplace(T[0][0], v);
            if (!inserted) CHECK(it->second == v);  // depends on the entry alone
        }
        REQUIRE(by_value.size() >= static_cast<std::size_t>(m) + 1);
        std::vector<std::pair<long, Rat>> pts(by_value.begin(), by_value.end());
        pts.resize(m + 1);
        return fit_polynomial(pts).back();
    };
    CHECK(leading({4, 3}, {4, 3}, 3) == Rat(19, 49));  // 1 - 6(n-2)/n^2 at n=7
    for (long m = 1; m <= 3; ++m) {
        CHECK(leading({4, 3}, {4, 3}, m) == 1 - Rat(2 * m * (7 + 1 - m), 49));
        CHECK(leading({5, 4}, {6, 3}, m) == 1 - Rat(2 * m * (9 + 1 - m), 81));
    }
}

TEST_CASE("eigen-identities hold across all small margins") {
    for (int n = 3; n <= 5; ++n) {
        const auto parts = partitions_of(n);
        for (const auto& lambda : parts)
            for (const auto& mu : parts) check_all_eigen_identities(lambda, mu);
    }
    check_all_eigen_identities({2, 2, 2}, {3, 2, 1});
    check_all_eigen_identities({3, 3}, {2, 2, 1, 1});
    check_all_eigen_identities({4, 2}, {2, 2, 2});
}
