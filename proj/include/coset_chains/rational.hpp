#pragma once

// Exact big-integer / big-rational arithmetic used everywhere a probability,
// moment, or eigenvalue must be checked for *equality* rather than closeness.
// Floating point enters only in samplers, the dense eigensolver and display
// formatting.

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace coset_chains {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int factorial(long n) {
    if (n < 0) throw std::invalid_argument("factorial: negative argument");
    Int r = 1;
    for (long t = 2; t <= n; ++t) r *= t;
    return r;
}

inline Int binomial(long n, long k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    Int r = 1;
    for (long t = 1; t <= k; ++t) {
        r *= (n - k + t);
        r /= t; // always divides: r is binomial(n-k+t, t)
    }
    return r;
}

// Rising factorial a_(s) = a (a+1) ... (a+s-1);  a_(0) = 1.
inline Rat rising(const Rat& a, long s) {
    Rat r = 1;
    for (long t = 0; t < s; ++t) r *= (a + t);
    return r;
}

// Falling factorial a_[s] = a (a-1) ... (a-s+1);  a_[0] = 1.
inline Rat falling(const Rat& a, long s) {
    Rat r = 1;
    for (long t = 0; t < s; ++t) r *= (a - t);
    return r;
}

// Integer power of a rational; negative exponents invert (base must be != 0).
inline Rat rat_pow(const Rat& base, long e) {
    if (e < 0) {
        if (base == 0) throw std::domain_error("rat_pow: zero base with negative exponent");
        return Rat(1) / rat_pow(base, -e);
    }
    Rat r = 1, b = base;
    for (long k = e; k > 0; k >>= 1) {
        if (k & 1) r *= b;
        if (k > 1) b *= b;
    }
    return r;
}

inline double to_double(const Rat& r) { return r.convert_to<double>(); }
inline double to_double(const Int& i) { return i.convert_to<double>(); }

// Exact conversion to a machine integer; throws if the value is not integral.
inline long long to_int_exact(const Rat& r) {
    if (denominator(r) != 1) throw std::domain_error("to_int_exact: not an integer");
    return numerator(r).convert_to<long long>();
}

inline std::string to_fraction_string(const Rat& r) {
    std::string s = numerator(r).str();
    if (denominator(r) != 1) s += "/" + denominator(r).str();
    return s;
}

} // namespace coset_chains
