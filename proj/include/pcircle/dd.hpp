#pragma once

#include <cmath>

// Double-double arithmetic: an unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
// Used where binary64 cancellation would eat the accuracy budget (alternating
// series with large terms, boundary classification of lattice points).
// Requires round-to-nearest IEEE binary64; do not compile with -ffast-math.

namespace pcircle {

struct dd {
    double hi = 0.0;
    double lo = 0.0;

    dd() = default;
    constexpr dd(double h) : hi(h), lo(0.0) {}
    constexpr dd(double h, double l) : hi(h), lo(l) {}

    explicit operator double() const { return hi + lo; }
};

namespace detail {

// |a| >= |b| not required.
inline dd two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

// Requires |a| >= |b| or a == 0.
inline dd quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline dd two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

} // namespace detail

inline dd operator+(dd a, dd b) {
    dd s = detail::two_sum(a.hi, b.hi);
    s.lo += a.lo + b.lo;
    return detail::quick_two_sum(s.hi, s.lo);
}

inline dd operator+(dd a, double b) {
    dd s = detail::two_sum(a.hi, b);
    s.lo += a.lo;
    return detail::quick_two_sum(s.hi, s.lo);
}

inline dd operator-(dd a) { return {-a.hi, -a.lo}; }
inline dd operator-(dd a, dd b) { return a + (-b); }
inline dd operator-(dd a, double b) { return a + (-b); }

inline dd operator*(dd a, dd b) {
    dd p = detail::two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return detail::quick_two_sum(p.hi, p.lo);
}

inline dd operator*(dd a, double b) {
    dd p = detail::two_prod(a.hi, b);
    p.lo += a.lo * b;
    return detail::quick_two_sum(p.hi, p.lo);
}

inline dd operator/(dd a, dd b) {
    double q1 = a.hi / b.hi;
    dd r = a - b * q1;
    double q2 = (r.hi + r.lo) / b.hi;
    r = r - b * q2;
    double q3 = (r.hi + r.lo) / b.hi;
    dd q = detail::quick_two_sum(q1, q2);
    return q + q3;
}

inline dd operator/(dd a, double b) { return a / dd(b); }

inline bool operator<(dd a, dd b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(dd a, dd b) { return b < a; }

inline dd dd_abs(dd a) { return a.hi < 0.0 ? -a : a; }

// a^n for small non-negative integer n.
inline dd dd_powi(dd a, int n) {
    dd result(1.0);
    dd base = a;
    while (n > 0) {
        if (n & 1) result = result * base;
        base = base * base;
        n >>= 1;
    }
    return result;
}

// q-th root of a > 0 by Newton iteration from a double seed.
// Two iterations give ~1e-30 relative accuracy.
inline dd dd_root(dd a, int q) {
    if (q == 1) return a;
    double seed = std::pow(a.hi + a.lo, 1.0 / q);
    dd x(seed);
    for (int it = 0; it < 2; ++it) {
        dd xq1 = dd_powi(x, q - 1);
        dd f = xq1 * x - a;
        x = x - f / (xq1 * double(q));
    }
    return x;
}

// Running compensated accumulator (Neumaier-style on top of dd words).
class dd_sum {
public:
    void add(double v) { acc_ = acc_ + v; }
    void add(dd v) { acc_ = acc_ + v; }
    dd value() const { return acc_; }
    double result() const { return acc_.hi + acc_.lo; }

private:
    dd acc_;
};

} // namespace pcircle
