#include "coset_chains/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coset_chains/spectral.hpp"

namespace coset_chains {

namespace {

using SparseRow = std::vector<std::pair<std::size_t, Rat>>;

// Materialize every kernel row once; evolution reuses them across steps.
std::vector<SparseRow> all_rows(const ChainKernel& kernel) {
    std::vector<SparseRow> rows(kernel.size());
    for (std::size_t s = 0; s < kernel.size(); ++s) rows[s] = kernel.row(s);
    return rows;
}

template <typename Scalar>
void require_distribution_size(const ChainKernel& kernel,
                               const std::vector<Scalar>& p) {
    if (p.size() != kernel.size())
        throw std::invalid_argument(
            "evolve_distribution: distribution length must match the state "
            "space");
}

std::vector<Rat> evolve_rows(const std::vector<SparseRow>& rows,
                             std::vector<Rat> p, long long t) {
    std::vector<Rat> next(p.size());
    for (long long step = 0; step < t; ++step) {
        std::fill(next.begin(), next.end(), Rat(0));
        for (std::size_t x = 0; x < p.size(); ++x) {
            if (p[x] == 0) continue;
            for (const auto& [y, prob] : rows[x]) next[y] += p[x] * prob;
        }
        p.swap(next);
    }
    return p;
}

void step_double(const std::vector<SparseRow>& rows, std::vector<double>& p,
                 std::vector<double>& scratch) {
    std::fill(scratch.begin(), scratch.end(), 0.0);
    for (std::size_t x = 0; x < p.size(); ++x) {
        if (p[x] == 0.0) continue;
        for (const auto& [y, prob] : rows[x]) scratch[y] += p[x] * to_double(prob);
    }
    p.swap(scratch);
}

Rat chi2_of(const std::vector<Rat>& p, const std::vector<Rat>& pi) {
    Rat out(0);
    for (std::size_t y = 0; y < p.size(); ++y) {
        const Rat d = p[y] - pi[y];
        out += d * d / pi[y];
    }
    return out;
}

double chi2_of(const std::vector<double>& p, const std::vector<double>& pi) {
    double out = 0.0;
    for (std::size_t y = 0; y < p.size(); ++y) {
        const double d = p[y] - pi[y];
        out += d * d / pi[y];
    }
    return out;
}

std::vector<Rat> point_mass(std::size_t size, std::size_t x0) {
    if (x0 >= size)
        throw std::invalid_argument("start state index out of range");
    std::vector<Rat> p(size, Rat(0));
    p[x0] = 1;
    return p;
}

}  // namespace

std::vector<Rat> evolve_distribution(const ChainKernel& kernel,
                                     const std::vector<Rat>& start,
                                     long long t) {
    require_distribution_size(kernel, start);
    if (t < 0) throw std::invalid_argument("evolve_distribution: t < 0");
    return evolve_rows(all_rows(kernel), start, t);
}

std::vector<double> evolve_distribution(const ChainKernel& kernel,
                                        const std::vector<double>& start,
                                        long long t) {
    require_distribution_size(kernel, start);
    if (t < 0) throw std::invalid_argument("evolve_distribution: t < 0");
    const auto rows = all_rows(kernel);
    std::vector<double> p = start;
    std::vector<double> scratch(p.size(), 0.0);
    for (long long step = 0; step < t; ++step) step_double(rows, p, scratch);
    return p;
}

Rat tv_distance(const std::vector<Rat>& p, const std::vector<Rat>& q) {
    if (p.size() != q.size())
        throw std::invalid_argument("tv_distance: length mismatch");
    Rat out(0);
    for (std::size_t y = 0; y < p.size(); ++y) out += abs(p[y] - q[y]);
    return out / 2;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size())
        throw std::invalid_argument("tv_distance: length mismatch");
    double out = 0.0;
    for (std::size_t y = 0; y < p.size(); ++y) out += std::abs(p[y] - q[y]);
    return out / 2;
}

Rat chi2_distance(const ChainKernel& kernel, std::size_t x0, long long t) {
    if (t < 0) throw std::invalid_argument("chi2_distance: t < 0");
    const auto rows = all_rows(kernel);
    const auto p = evolve_rows(rows, point_mass(kernel.size(), x0), t);
    return chi2_of(p, kernel.stationary());
}

Rat avg_chi2_exact(const ChainKernel& kernel, long long t) {
    if (t < 0) throw std::invalid_argument("avg_chi2_exact: t < 0");
    const auto rows = all_rows(kernel);
    const auto pi = kernel.stationary();
    Rat out(0);
    for (std::size_t x = 0; x < kernel.size(); ++x)
        out += pi[x] * chi2_of(evolve_rows(rows, point_mass(kernel.size(), x), t), pi);
    return out;
}

Rat avg_chi2_sum_form(long long k, long long n, long long t) {
    if (k < 1 || 2 * k > n)
        throw std::invalid_argument("avg_chi2_sum_form: need 1 <= k <= n/2");
    if (t < 0) throw std::invalid_argument("avg_chi2_sum_form: t < 0");
    Rat out(0);
    for (long long m = 1; m <= k; ++m)
        out += rat_pow(beta_two_row(m, n), 2 * t);
    return out;
}

long long mixing_time(const ChainKernel& kernel, const Rat& eps) {
    if (!(eps > 0 && eps < 1))
        throw std::invalid_argument("mixing_time: eps must lie in (0,1)");
    const std::size_t size = kernel.size();
    if (size == 1) return 0;
    const auto rows = all_rows(kernel);
    const auto pi = kernel.stationary();
    const auto tv_at = [&](std::size_t x, long long t) {
        return tv_distance(evolve_rows(rows, point_mass(size, x), t), pi);
    };
    long long worst = 0;
    for (std::size_t x = 0; x < size; ++x) {
        if (tv_at(x, worst) < eps) continue;  // this start cannot raise the max
        long long hi = std::max<long long>(2 * worst, 1);
        while (!(tv_at(x, hi) < eps)) {
            hi *= 2;
            if (hi > (1LL << 24))
                throw std::runtime_error("mixing_time: no convergence");
        }
        long long lo = hi / 2;  // tv(lo) >= eps whenever lo > 0; tv never increases
        while (hi - lo > 1) {
            const long long mid = lo + (hi - lo) / 2;
            (tv_at(x, mid) < eps ? hi : lo) = mid;
        }
        worst = std::max(worst, hi);
    }
    return worst;
}

MixProfile mix_profile(const ChainKernel& kernel, std::size_t x0,
                       long long t_max, long long exact_step_budget,
                       std::size_t exact_state_budget) {
    if (t_max < 0) throw std::invalid_argument("mix_profile: t_max < 0");
    const auto rows = all_rows(kernel);
    const auto pi = kernel.stationary();
    MixProfile profile;
    profile.rows.reserve(static_cast<std::size_t>(t_max) + 1);

    const bool start_exact = kernel.size() <= exact_state_budget;
    std::vector<Rat> p;
    std::vector<double> pd;
    std::vector<double> pid(pi.size());
    for (std::size_t y = 0; y < pi.size(); ++y) pid[y] = to_double(pi[y]);
    if (start_exact)
        p = point_mass(kernel.size(), x0);
    else {
        if (x0 >= kernel.size())
            throw std::invalid_argument("start state index out of range");
        pd.assign(kernel.size(), 0.0);
        pd[x0] = 1.0;
    }

    bool exact = start_exact;
    std::vector<double> scratch(kernel.size(), 0.0);
    for (long long t = 0; t <= t_max; ++t) {
        if (exact && t > exact_step_budget) {
            // hand the trajectory over to doubles and record the switch
            pd.resize(p.size());
            for (std::size_t y = 0; y < p.size(); ++y) pd[y] = to_double(p[y]);
            exact = false;
        }
        DistanceProfile row;
        row.t = t;
        if (exact) {
            row.tv = to_double(tv_distance(p, pi));
            row.chi2 = to_double(chi2_of(p, pi));
            profile.exact_until = t;
        } else {
            row.tv = tv_distance(pd, pid);
            row.chi2 = chi2_of(pd, pid);
        }
        row.bound = std::sqrt(std::max(row.chi2, 0.0)) / 2;
        profile.rows.push_back(row);
        if (t == t_max) break;
        if (exact)
            p = evolve_rows(rows, std::move(p), 1);
        else
            step_double(rows, pd, scratch);
    }
    return profile;
}

PrescribedBound avg_chi2_bound(long long k, long long l, long long n, double c,
                               BoundSide side) {
    if (k < 1 || k > l || 2 * l > n)
        throw std::invalid_argument(
            "avg_chi2_bound: need 1 <= k <= l <= n/2");
    PrescribedBound out;
    if (side == BoundSide::Upper) {
        if (!(c > 0))
            throw std::invalid_argument("avg_chi2_bound: upper side needs c > 0");
        out.t = (n / 4.0) * (std::log(static_cast<double>(k)) + c);
        out.bound = std::exp(-c);
    } else {
        if (!(c >= 0))
            throw std::invalid_argument("avg_chi2_bound: lower side needs c >= 0");
        out.t = c * n / 4.0;
        out.bound = 1.0 - c;
    }
    return out;
}

namespace {

void require_extreme_state(long long k, const Margins& mu, std::size_t j) {
    require_margins(mu, "mu");
    if (j >= mu.size())
        throw std::invalid_argument("column index out of range");
    const long long n = partition_sum(mu);
    if (k < 1 || 2 * k >= n)
        throw std::invalid_argument("need 1 <= k and n > 2k");
    if (mu[j] <= k) throw std::domain_error("extreme state does not exist");
}

}  // namespace

ExtremeStateBounds extreme_state_bounds(long long k, const Margins& mu,
                                        std::size_t j, double c) {
    require_extreme_state(k, mu, j);
    if (!(c > 0))
        throw std::invalid_argument("extreme_state_bounds: need c > 0");
    const double n = static_cast<double>(partition_sum(mu));
    const double mj = mu[j];
    ExtremeStateBounds out;
    out.t_upper = (n / 4.0 + k * (k - 1.0) / (2.0 * (n - 2 * k))) *
                  (std::log(k * n * (n - mj) / ((n - 2 * k) * (mj - k))) + c);
    out.t_lower = (n / 8.0) *
                  (std::log(k * (n - 1) * (n - mj) / ((n - k) * mj)) - c);
    return out;
}

Rat extreme_chi2(long long k, const Margins& mu, std::size_t j, long long t) {
    require_extreme_state(k, mu, j);
    if (t < 0) throw std::invalid_argument("extreme_chi2: t < 0");
    const long long n = partition_sum(mu);
    Rat out(0);
    for (long long m = 1; m <= k; ++m)
        out += rat_pow(beta_two_row(m, n), 2 * t) *
               kernel_poly_extreme(m, k, mu[j], n);
    return out;
}

WilsonBound wilson_lower_bound(const Margins& lambda, const Margins& mu,
                               std::size_t i, std::size_t j, double c) {
    require_margins(lambda, "lambda");
    require_margins(mu, "mu");
    const long long n = partition_sum(lambda);
    if (partition_sum(mu) != n)
        throw std::invalid_argument("wilson_lower_bound: margins must have equal sums");
    if (i >= lambda.size() || j >= mu.size())
        throw std::invalid_argument("wilson_lower_bound: cell out of range");
    if (!(c > 0))
        throw std::invalid_argument("wilson_lower_bound: need c > 0");
    const double li = lambda[i], mj = mu[j], dn = static_cast<double>(n);
    const double m_ij = std::min(li, mj);
    WilsonBound out;
    double& arg = out.argument;
    if (dn >= 2 * (li + mj)) {
        out.case_fired = 1;
        arg = m_ij - li * mj / dn;
    } else {
        out.case_fired = 2;
        const double dev = dn * m_ij - li * mj;
        arg = dev * dev / (2 * dn * (dn + 2) * li * mj);
    }
    const double t = (dn / 4 - 0.5) * (std::log(arg) - c);
    if (!(arg > 1) || !(t > 0)) {
        out.degenerate = true;
        out.t_lower = 0.0;
    } else {
        out.t_lower = t;
    }
    return out;
}

double spectral_gap(const ChainKernel& kernel) {
    if (kernel.size() == 1) return 1.0;
    const auto eigs = brute_force_spectrum(kernel);
    return 1.0 - eigs[1];
}

namespace {

ChainRelaxation summarize(const ChainKernel& kernel) {
    ChainRelaxation out;
    out.kind = kernel.kind();
    const auto eigs = brute_force_spectrum(kernel);
    if (eigs.size() == 1) {
        out.second_eigenvalue = out.min_eigenvalue = 0.0;
        out.gap = out.abs_gap = out.relaxation = 1.0;
        return out;
    }
    out.second_eigenvalue = eigs[1];
    out.min_eigenvalue = eigs.back();
    out.gap = 1.0 - out.second_eigenvalue;
    out.abs_gap =
        1.0 - std::max(std::abs(out.second_eigenvalue), std::abs(out.min_eigenvalue));
    out.relaxation = 1.0 / out.abs_gap;
    return out;
}

}  // namespace

RelaxationReport relaxation_comparison(const Margins& lambda, const Margins& mu) {
    RelaxationReport report;
    const KernelKind kinds[4] = {
        KernelKind::RandomTranspositions, KernelKind::UniformSwap,
        KernelKind::MetropolisUniform, KernelKind::MetropolisFisherYates};
    for (int c = 0; c < 4; ++c)
        report.chains[c] = summarize(ChainKernel(kinds[c], lambda, mu));

    const ChainKernel probe(KernelKind::RandomTranspositions, lambda, mu);
    report.states = probe.size();
    report.n_rows = lambda.size();
    report.n_cols = mu.size();
    report.total = partition_sum(lambda);
    long long min_pos = 0, max_entry = 0;
    for (const auto& T : probe.states())
        for (const auto& row : T)
            for (const int v : row)
                if (v > 0) {
                    max_entry = std::max<long long>(max_entry, v);
                    min_pos = min_pos == 0 ? v : std::min<long long>(min_pos, v);
                }
    report.min_positive_entry = min_pos;
    report.max_entry = max_entry;

    if (probe.size() == 1) {
        report.single_state = true;
        return report;
    }

    const double ij = static_cast<double>(report.n_rows * report.n_cols);
    const double n2 = static_cast<double>(report.total) * report.total;
    const double m2 = static_cast<double>(min_pos) * min_pos;
    const double M2 = static_cast<double>(max_entry) * max_entry;
    const double tau_fy = report.chains[0].relaxation;
    const double tau_u = report.chains[1].relaxation;
    const double tau_um = report.chains[2].relaxation;
    const double tau_fym = report.chains[3].relaxation;

    report.uniform_lower = m2 * ij * ij / n2 * tau_um;
    report.uniform_upper = M2 * ij * ij / n2 * tau_um;
    report.fy_lower = n2 / (ij * ij * M2 * M2) * tau_fym;
    report.fy_upper = n2 / (ij * ij * m2 * m2) * tau_fym;

    const double slack = 1e-9;
    report.uniform_ok = report.uniform_lower <= tau_u * (1 + slack) + slack &&
                        tau_u <= report.uniform_upper * (1 + slack) + slack;
    report.fy_ok = report.fy_lower <= tau_fy * (1 + slack) + slack &&
                   tau_fy <= report.fy_upper * (1 + slack) + slack;
    return report;
}

EmpiricalTv empirical_tv(const ChainKernel& kernel, std::size_t x0, long long t,
                         long long paths, SplitMix64& rng,
                         int bootstrap_rounds) {
    if (x0 >= kernel.size())
        throw std::invalid_argument("start state index out of range");
    if (paths < 1) throw std::invalid_argument("empirical_tv: paths < 1");
    if (t < 0) throw std::invalid_argument("empirical_tv: t < 0");

    // per-state cumulative transition tables for O(log row) sampling
    const std::size_t size = kernel.size();
    std::vector<std::vector<double>> cdf(size);
    std::vector<std::vector<std::size_t>> target(size);
    for (std::size_t s = 0; s < size; ++s) {
        double acc = 0.0;
        for (const auto& [y, prob] : kernel.row(s)) {
            acc += to_double(prob);
            cdf[s].push_back(acc);
            target[s].push_back(y);
        }
        cdf[s].back() = 1.0;  // guard against rounding at the tail
    }

    std::vector<long long> counts(size, 0);
    for (long long p = 0; p < paths; ++p) {
        std::size_t s = x0;
        for (long long step = 0; step < t; ++step) {
            const double u = rng.uniform();
            const auto it = std::lower_bound(cdf[s].begin(), cdf[s].end(), u);
            s = target[s][static_cast<std::size_t>(it - cdf[s].begin())];
        }
        ++counts[s];
    }

    const auto pi = kernel.stationary();
    std::vector<double> pid(size);
    for (std::size_t y = 0; y < size; ++y) pid[y] = to_double(pi[y]);
    const auto plug_in = [&](const std::vector<long long>& c) {
        double tv = 0.0;
        for (std::size_t y = 0; y < size; ++y)
            tv += std::abs(static_cast<double>(c[y]) / paths - pid[y]);
        return tv / 2;
    };

    EmpiricalTv out;
    out.estimate = plug_in(counts);

    // multinomial resampling of the counts; the per-bucket conditional
    // binomials use a normal approximation (counts here are >= 10^4)
    std::vector<double> replicates;
    replicates.reserve(static_cast<std::size_t>(bootstrap_rounds));
    std::vector<long long> resample(size, 0);
    for (int b = 0; b < bootstrap_rounds; ++b) {
        long long left = paths;
        double mass = 1.0;
        for (std::size_t y = 0; y + 1 < size; ++y) {
            const double p = mass > 0 ? std::clamp(
                (static_cast<double>(counts[y]) / paths) / mass, 0.0, 1.0) : 0.0;
            const double mean = left * p;
            const double sd = std::sqrt(std::max(left * p * (1 - p), 0.0));
            // Box-Muller from two raw draws
            const double u1 = std::max(rng.uniform(), 1e-300);
            const double u2 = rng.uniform();
            const double z =
                std::sqrt(-2 * std::log(u1)) * std::cos(6.283185307179586 * u2);
            long long draw = std::llround(mean + sd * z);
            draw = std::clamp<long long>(draw, 0, left);
            resample[y] = draw;
            left -= draw;
            mass -= static_cast<double>(counts[y]) / paths;
        }
        resample[size - 1] = left;
        replicates.push_back(plug_in(resample));
    }
    std::sort(replicates.begin(), replicates.end());
    const auto quantile = [&](double q) {
        const double pos = q * (replicates.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, replicates.size() - 1);
        const double frac = pos - lo;
        return replicates[lo] * (1 - frac) + replicates[hi] * frac;
    };
    out.ci_low = quantile(0.025);
    out.ci_high = quantile(0.975);
    return out;
}

}  // namespace coset_chains
