#pragma once
// Exact polynomial eigenfunctions of the transposition table chain: the
// linear family f_ij = x_ij - lambda_i mu_j / n (eigenvalue 1 - 2/n) and the
// quadratic families (eigenvalue 1 - 4/n + 4/n^2), together with the
// one-step conditional moment formulas they are derived from.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "coset_chains/rational.hpp"
#include "coset_chains/table.hpp"

namespace coset_chains {

enum class PolyKind {
    Linear,            // single cell (i,j)
    QuadDisjoint,      // cells (i,j),(k,l) with i != k, j != l
    QuadSharedColumn,  // cells (i,j),(k,j) with i != k
    QuadSharedRow,     // cells (i,j),(i,l) with j != l
    QuadDiagonal,      // the same cell twice
};

// One additive term: coeff times the product of the listed entries (an empty
// cell list is the constant term).
struct CellTerm {
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    Rat coeff;
};

// A polynomial in the table entries realizing a known chain eigenvalue.
// `note` is empty when the familiar closed-form coefficients satisfied the
// one-step identity; otherwise it describes the corrected pairing.
struct CellPolynomial {
    PolyKind kind;
    std::vector<std::pair<std::size_t, std::size_t>> cells;  // defining cells
    std::vector<CellTerm> terms;
    Rat eigenvalue;
    std::string note;
};

Rat evaluate(const CellPolynomial& poly, const Table& T);

// E_pi[poly(T)] under Fisher-Yates, via the exact first and second moments.
Rat stationary_mean(const CellPolynomial& poly, const Margins& lambda,
                    const Margins& mu);

// f_ij(x) = x_ij - lambda_i mu_j / n, eigenvalue 1 - 2/n.
CellPolynomial linear_f(const Margins& lambda, const Margins& mu, std::size_t i,
                        std::size_t j);

// The quadratic eigenfunction attached to the unordered cell pair
// (i,j),(k,l), eigenvalue 1 - 4/n + 4/n^2.  The coefficients are solved
// exactly from the one-step moment identity at construction (and checked
// against it), so the result is an eigenfunction by construction.  For
// disjoint pairs the function is symmetric in swapping l with j, and the
// representation is canonicalized to i < k, j < l.  Requires n >= 3.
CellPolynomial quadratic_f(const Margins& lambda, const Margins& mu, std::size_t i,
                           std::size_t j, std::size_t k, std::size_t l);

// E[T_1(i,j) T_1(k,l) | T_0 = T], exact, any cell pair.
Rat second_moment_step(const Margins& lambda, const Margins& mu, std::size_t i,
                       std::size_t j, std::size_t k, std::size_t l, const Table& T);

// E[T_1(i,j)^m | T_0 = T] via the single-entry birth/death probabilities;
// as a polynomial in x_ij the leading coefficient is 1 - 2m(n+1-m)/n^2.
// Requires m >= 1.
Rat moment_degree_recursion(const Margins& lambda, const Margins& mu, std::size_t i,
                            std::size_t j, long m, const Table& T);

}  // namespace coset_chains
