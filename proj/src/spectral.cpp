#include "coset_chains/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace coset_chains {

Rat beta(const Partition& rho, long n) {
    require_partition(rho, "rho");
    if (partition_sum(rho) != n)
        throw std::invalid_argument("beta: rho must be a partition of n");
    long long s = 0;
    for (std::size_t j = 1; j <= rho.size(); ++j) {
        const long long r = rho[j - 1];
        s += r * r - (2 * static_cast<long long>(j) - 1) * r;
    }
    return Rat(1, n) + Rat(s, static_cast<long long>(n) * n);
}

Rat beta_two_row(long m, long n) {
    if (m < 0 || 2 * m > n)
        throw std::invalid_argument("beta_two_row: need 0 <= m <= n/2");
    return 1 - Rat(2 * m * (n + 1 - m), static_cast<long long>(n) * n);
}

Spectrum spectrum(const Margins& lambda, const Margins& mu) {
    require_margins(lambda, "lambda");
    require_margins(mu, "mu");
    const long n = partition_sum(lambda);
    if (partition_sum(mu) != n)
        throw std::invalid_argument("spectrum: margins must have equal sums");
    // the spectrum is invariant under reordering the margins
    Partition ls = lambda, ms = mu;
    std::sort(ls.rbegin(), ls.rend());
    std::sort(ms.rbegin(), ms.rend());
    Spectrum out;
    for (const auto& rho : partitions_of(static_cast<int>(n))) {
        const long long mult = kostka(rho, ls) * kostka(rho, ms);
        if (mult > 0) out.push_back({rho, beta(rho, n), mult});
    }
    return out;
}

namespace {

// Cyclic Jacobi on a dense symmetric matrix stored row-major; returns the
// diagonal (unsorted).  Rotations smaller than tol/(2N) are skipped: a full
// quiet sweep then certifies off-diagonal Frobenius norm below tol.
std::vector<double> jacobi_eigenvalues(std::vector<double>& a, std::size_t N) {
    const double tol = 1e-12;
    const double skip = N ? tol / (2.0 * static_cast<double>(N)) : tol;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off2 = 0;
        for (std::size_t p = 0; p < N; ++p)
            for (std::size_t q = p + 1; q < N; ++q) off2 += 2 * a[p * N + q] * a[p * N + q];
        if (std::sqrt(off2) < tol) {
            std::vector<double> diag(N);
            for (std::size_t i = 0; i < N; ++i) diag[i] = a[i * N + i];
            return diag;
        }
        for (std::size_t p = 0; p < N; ++p)
            for (std::size_t q = p + 1; q < N; ++q) {
                const double apq = a[p * N + q];
                if (std::abs(apq) <= skip) continue;
                const double tau = (a[q * N + q] - a[p * N + p]) / (2 * apq);
                const double t = (tau >= 0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1 + tau * tau));
                const double c = 1 / std::sqrt(1 + t * t), s = t * c;
                a[p * N + p] -= t * apq;
                a[q * N + q] += t * apq;
                a[p * N + q] = a[q * N + p] = 0;
                for (std::size_t r = 0; r < N; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a[r * N + p], arq = a[r * N + q];
                    a[r * N + p] = a[p * N + r] = c * arp - s * arq;
                    a[r * N + q] = a[q * N + r] = s * arp + c * arq;
                }
            }
    }
    throw std::runtime_error("eigensolver failed to converge in 100 sweeps");
}

} // namespace

std::vector<double> brute_force_spectrum(const ChainKernel& kernel) {
    const std::size_t N = kernel.size();
    if (N > 2000)
        throw std::runtime_error("state space too large for the dense eigensolver");
    const std::vector<Rat> pi = kernel.stationary();
    std::vector<std::vector<std::pair<std::size_t, Rat>>> rows(N);
    for (std::size_t s = 0; s < N; ++s) {
        rows[s] = kernel.row(s);
        std::sort(rows[s].begin(), rows[s].end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    const auto entry = [&](std::size_t s, std::size_t t) -> Rat {
        const auto& row = rows[s];
        auto it = std::lower_bound(row.begin(), row.end(), t,
                                   [](const auto& e, std::size_t v) { return e.first < v; });
        return it != row.end() && it->first == t ? it->second : Rat(0);
    };
    for (std::size_t s = 0; s < N; ++s)
        for (const auto& [t, p] : rows[s]) {
            if (t <= s) continue;
            if (pi[s] * p != pi[t] * entry(t, s))
                throw std::runtime_error("kernel is not reversible");
        }
    std::vector<double> root(N);
    for (std::size_t s = 0; s < N; ++s) root[s] = std::sqrt(to_double(pi[s]));
    std::vector<double> a(N * N, 0.0);
    for (std::size_t s = 0; s < N; ++s)
        for (const auto& [t, p] : rows[s])
            a[s * N + t] = to_double(p) * root[s] / root[t];
    for (std::size_t s = 0; s < N; ++s)          // symmetrize away rounding
        for (std::size_t t = s + 1; t < N; ++t) {
            const double avg = (a[s * N + t] + a[t * N + s]) / 2;
            a[s * N + t] = a[t * N + s] = avg;
        }
    std::vector<double> eig = jacobi_eigenvalues(a, N);
    std::sort(eig.rbegin(), eig.rend());
    return eig;
}

Rat hahn_univariate(long m, long x, long k, const Rat& a, const Rat& b) {
    if (m < 0 || x < 0 || k < 0 || x > k)
        throw std::invalid_argument("hahn_univariate: need m >= 0 and 0 <= x <= k");
    Rat total = 0, num = 1, den = 1;
    for (long s = 0; s <= m; ++s) {
        if (num == 0) break;  // the numerator products only gain zero factors
        if (den == 0)
            throw std::domain_error(
                "hahn_univariate: denominator vanished before termination");
        total += num / den;
        num *= Rat(-m + s) * (a + b + (m - 1 + s)) * Rat(-x + s);
        den *= (a + s) * Rat(-k + s) * (s + 1);
    }
    return total;
}

namespace {

// One coordinate factor of the multivariate polynomial: the univariate sum
// with the size-parameter Pochhammer (-kp)_(m) folded in, which removes the
// 0/0 that a small remaining budget kp < m would otherwise produce.
Rat hahn_factor_fused(long m, long x, long kp, long a, long b) {
    Rat total = 0, num = 1, den = 1;
    for (long s = 0; s <= m; ++s) {
        if (num == 0) break;
        if (den == 0)
            throw std::domain_error(
                "hahn_multivariate: denominator vanished before termination");
        Rat tail = 1;  // prod_{t=s}^{m-1} (-kp + t)
        for (long t = s; t < m; ++t) tail *= Rat(-kp + t);
        total += num * tail / den;
        num *= Rat(-m + s) * Rat(a + b + m - 1 + s) * Rat(-x + s);
        den *= Rat(a + s) * Rat(s + 1);
    }
    return total;
}

void require_slice_point(const std::vector<int>& x, long k, const Margins& mu) {
    if (x.size() != mu.size())
        throw std::invalid_argument("slice point has the wrong length");
    long total = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] < 0 || x[j] > mu[j])
            throw std::invalid_argument("slice point out of range");
        total += x[j];
    }
    if (total != k) throw std::invalid_argument("slice point does not sum to k");
}

} // namespace

Rat hahn_multivariate(const std::vector<int>& m, const std::vector<int>& x,
                      long k, const Margins& mu) {
    require_margins(mu, "mu");
    require_slice_point(x, k, mu);
    if (m.size() + 1 != mu.size())
        throw std::invalid_argument("hahn_multivariate: index must have length J-1");
    long degree = 0;
    for (int mj : m) {
        if (mj < 0) throw std::invalid_argument("hahn_multivariate: negative index");
        degree += mj;
    }
    const Rat lead = falling(Rat(k), degree);
    if (lead == 0)
        throw std::domain_error("hahn_multivariate: degenerate size parameter");
    Rat result = Rat(degree % 2 ? -1 : 1) / lead;
    long prefix_x = 0;   // x_1 + ... + x_{j-1}
    long suffix_m = 0;   // m_{j+1} + ... + m_{J-1}
    long suffix_mu = 0;  // mu_{j+1} + ... + mu_J
    for (std::size_t j = 0; j < m.size(); ++j) suffix_m += m[j];
    for (std::size_t j = 0; j < mu.size(); ++j) suffix_mu += mu[j];
    for (std::size_t j = 0; j < m.size(); ++j) {
        suffix_m -= m[j];
        suffix_mu -= mu[j];
        result *= hahn_factor_fused(m[j], x[j], k - prefix_x - suffix_m, -mu[j],
                                    2 * suffix_m - suffix_mu);
        prefix_x += x[j];
    }
    return result;
}

Rat hypergeometric_weight(const std::vector<int>& x, long k, const Margins& mu) {
    require_margins(mu, "mu");
    require_slice_point(x, k, mu);
    Int num = 1;
    for (std::size_t j = 0; j < x.size(); ++j) num *= binomial(mu[j], x[j]);
    return Rat(num, binomial(partition_sum(mu), k));
}

std::vector<std::vector<int>> slice_states(long k, const Margins& mu) {
    require_margins(mu, "mu");
    if (k < 0 || k > partition_sum(mu))
        throw std::invalid_argument("slice_states: k out of range");
    std::vector<std::vector<int>> out;
    std::vector<int> cur(mu.size(), 0);
    long later = partition_sum(mu);
    const std::function<void(std::size_t, long)> rec = [&](std::size_t j, long rem) {
        if (j == mu.size()) {
            out.push_back(cur);
            return;
        }
        later -= mu[j];
        const int hi = static_cast<int>(std::min<long>(rem, mu[j]));
        const int lo = static_cast<int>(std::max<long>(0, rem - later));
        for (int v = hi; v >= lo; --v) {
            cur[j] = v;
            rec(j + 1, rem - v);
        }
        cur[j] = 0;
        later += mu[j];
    };
    rec(0, k);
    return out;
}

Rat kernel_poly_extreme(long m, long k, long mu_j, long n) {
    if (m < 1 || m > k)
        throw std::invalid_argument("kernel_poly_extreme: need 1 <= m <= k");
    if (mu_j < k)
        throw std::invalid_argument("kernel_poly_extreme: extreme state needs mu_j >= k");
    if (mu_j > n || k > n)
        throw std::invalid_argument("kernel_poly_extreme: margins exceed n");
    const auto fall = [](long a, long len) {
        Int p = 1;
        for (long t = 0; t < len; ++t) p *= a - t;
        return p;
    };
    return Rat(binomial(k, m) * (n - 2 * m + 1) * fall(n, m - 1) * fall(n - mu_j, m),
               fall(n - k, m) * fall(mu_j, m));
}

}  // namespace coset_chains
