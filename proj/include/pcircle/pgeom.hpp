#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pcircle/dd.hpp"
#include "pcircle/numkernel.hpp"

// p-norm geometry for exponents p = 2/q with integer q >= 1: distorted polar
// coordinates, exact lattice-point counts, the area error term and shell
// enumeration with distorted angles.

namespace pcircle {

// The exponent p encoded through the integer q = 2/p, so the constraint
// 2/p in N holds by construction.
struct PExponent {
    int q = 1;

    PExponent() = default;
    explicit PExponent(int q_) : q(q_) {
        if (q < 1) throw std::invalid_argument("PExponent: q = 2/p must be a positive integer");
    }
    double p() const { return 2.0 / double(q); }
};

struct LatticePoint {
    std::int64_t n1 = 0;
    std::int64_t n2 = 0;
    friend bool operator<(const LatticePoint& a, const LatticePoint& b) {
        return a.n1 < b.n1 || (a.n1 == b.n1 && a.n2 < b.n2);
    }
    friend bool operator==(const LatticePoint& a, const LatticePoint& b) {
        return a.n1 == b.n1 && a.n2 == b.n2;
    }
};

// (r, phi) with r = |x|_p and phi the distorted angle of the map
// x = (sgn(cos phi) r |cos phi|^{2/p}, sgn(sin phi) r |sin phi|^{2/p}).
struct DistortedPolar {
    double r = 0.0;
    double phi = 0.0;
};

// All lattice points sharing one value s = |n|_p^p, with their distorted
// angles in the same order as the points.
struct Shell {
    double s = 0.0;
    std::vector<LatticePoint> points;
    std::vector<double> angles;
};

struct ErrorTermResult {
    double value = 0.0;
    std::int64_t count = 0;
    double area = 0.0;
    bool boundary_flag = false; // some |n|_p is within 1e-9 * r of the curve
    double boundary_gap = std::numeric_limits<double>::infinity();
};

namespace detail {

// Canonical double value of t^{2/q} for t >= 0. Every comparison in this
// module goes through this one function so that the row scan, the brute
// force oracle and the shell builder classify points identically.
inline double pq_power(double t, int q) {
    switch (q) {
        case 1: return t * t;
        case 2: return t;
        case 3: return std::cbrt(t * t);
        case 4: return std::sqrt(t);
        default: return std::pow(t, 2.0 / double(q));
    }
}

inline dd pq_power_dd(double t, int q) {
    dd t2 = two_prod(t, t);
    if (q == 1) return t2;
    return dd_root(t2, q);
}

// s(n) = |n1|^p + |n2|^p in canonical double arithmetic.
inline double s_value(std::int64_t n1, std::int64_t n2, int q) {
    return pq_power(double(n1 < 0 ? -n1 : n1), q) + pq_power(double(n2 < 0 ? -n2 : n2), q);
}

inline dd s_value_dd(std::int64_t n1, std::int64_t n2, int q) {
    return pq_power_dd(double(n1 < 0 ? -n1 : n1), q) + pq_power_dd(double(n2 < 0 ? -n2 : n2), q);
}

// Strict-interior predicate |n|_p^p < threshold, where threshold = r^{2/q}
// passed both as double and dd. Near-ties in binary64 are re-decided in
// double-double so that q-th roots of integers never flip a classification.
inline bool point_inside(std::int64_t n1, std::int64_t n2, int q, double thr, dd thr_dd) {
    double s = s_value(n1, n2, q);
    double margin = std::abs(s - thr);
    if (margin > 1e-9 * std::max(1.0, thr)) return s < thr;
    dd s_dd = s_value_dd(n1, n2, q);
    return s_dd < thr_dd;
}

// Largest m >= 0 with pq_power(m) < rem under the canonical predicate, or -1.
inline std::int64_t row_max_coord(int q, double thr, dd thr_dd, std::int64_t n1) {
    double a = pq_power(double(n1 < 0 ? -n1 : n1), q);
    double rem = thr - a;
    if (rem <= 0.0 && !point_inside(n1, 0, q, thr, thr_dd)) return -1;
    // invert: m ~ rem^{q/2}
    double est = 0.0;
    if (rem > 0.0) {
        switch (q) {
            case 1: est = std::sqrt(rem); break;
            case 2: est = rem; break;
            case 3: est = rem * std::sqrt(rem); break;
            case 4: est = rem * rem; break;
            default: est = std::pow(rem, double(q) / 2.0); break;
        }
    }
    std::int64_t m = std::int64_t(est);
    // correct the estimate with the canonical predicate
    while (m > 0 && !point_inside(n1, m, q, thr, thr_dd)) --m;
    while (point_inside(n1, m + 1, q, thr, thr_dd)) ++m;
    if (m == 0 && !point_inside(n1, 0, q, thr, thr_dd)) return -1;
    return m;
}

} // namespace detail

inline double p_norm(double x1, double x2, PExponent p) {
    double s = detail::pq_power(std::abs(x1), p.q) + detail::pq_power(std::abs(x2), p.q);
    if (s == 0.0) return 0.0;
    switch (p.q) {
        case 1: return std::sqrt(s);
        case 2: return s;
        case 3: return s * std::sqrt(s);
        case 4: return s * s;
        default: return std::pow(s, double(p.q) / 2.0);
    }
}

inline double from_distorted_polar_x1(const DistortedPolar& dp, PExponent p) {
    double c = std::cos(dp.phi);
    double v = dp.r * std::pow(std::abs(c), 2.0 / p.p());
    return std::copysign(v, c);
}

inline double from_distorted_polar_x2(const DistortedPolar& dp, PExponent p) {
    double s = std::sin(dp.phi);
    double v = dp.r * std::pow(std::abs(s), 2.0 / p.p());
    return std::copysign(v, s);
}

inline std::pair<double, double> from_distorted_polar(const DistortedPolar& dp, PExponent p) {
    return {from_distorted_polar_x1(dp, p), from_distorted_polar_x2(dp, p)};
}

inline DistortedPolar to_distorted_polar(double x1, double x2, PExponent p) {
    if (x1 == 0.0 && x2 == 0.0)
        throw std::domain_error("to_distorted_polar: angle undefined at the origin");
    double r = p_norm(x1, x2, p);
    // |cos phi| = (|x1|/r)^{p/2}; with u_i = |x_i|^p / r^p this is sqrt(u_1).
    double rp = detail::pq_power(r, p.q);
    double u1 = detail::pq_power(std::abs(x1), p.q) / rp;
    double u2 = detail::pq_power(std::abs(x2), p.q) / rp;
    double c = std::copysign(std::sqrt(u1), x1);
    double s = std::copysign(std::sqrt(u2), x2);
    double phi = std::atan2(s, c);
    if (phi < 0.0) phi += 2.0 * std::numbers::pi;
    if (phi >= 2.0 * std::numbers::pi) phi = 0.0;
    return {r, phi};
}

inline double area_term(PExponent p, double r) {
    double q = double(p.q);
    double c = q * std::exp(2.0 * log_gamma(q / 2.0) - log_gamma(q));
    return c * r * r;
}

// N_p(r): lattice points strictly inside the p-circle of radius r, row scan
// over n1 with per-row integer bounds.
inline std::int64_t count_lattice_points(PExponent p, double r) {
    if (!(r > 0.0) || !std::isfinite(r))
        throw std::domain_error("count_lattice_points: radius must be positive and finite");
    if (area_term(p, r) > 8.8e18)
        throw std::overflow_error("count_lattice_points: count would overflow int64");
    const int q = p.q;
    const double thr = detail::pq_power(r, q);
    dd thr_dd = detail::pq_power_dd(r, q);
    // row n1 = 0
    std::int64_t m0 = detail::row_max_coord(q, thr, thr_dd, 0);
    std::int64_t total = (m0 >= 0) ? 2 * m0 + 1 : 0;
    for (std::int64_t n1 = 1;; ++n1) {
        std::int64_t m = detail::row_max_coord(q, thr, thr_dd, n1);
        if (m < 0) break;
        total += 2 * (2 * m + 1);
    }
    return total;
}

// Smallest distance | |n|_p - r | over lattice points adjacent to the curve.
inline double boundary_gap(PExponent p, double r) {
    const int q = p.q;
    const double thr = detail::pq_power(r, q);
    dd thr_dd = detail::pq_power_dd(r, q);
    double best = std::numeric_limits<double>::infinity();
    auto check = [&](std::int64_t n1, std::int64_t n2) {
        if (n1 == 0 && n2 == 0) return;
        double rn = p_norm(double(n1), double(n2), p);
        best = std::min(best, std::abs(rn - r));
    };
    for (std::int64_t n1 = 0;; ++n1) {
        if (detail::pq_power(double(n1), q) > thr && n1 > 0) {
            check(n1, 0); // first excluded axis point
            break;
        }
        std::int64_t m = detail::row_max_coord(q, thr, thr_dd, n1);
        check(n1, m < 0 ? 0 : m);
        check(n1, m < 0 ? 1 : m + 1);
    }
    return best;
}

inline ErrorTermResult error_term_direct(PExponent p, double r) {
    ErrorTermResult res;
    res.count = count_lattice_points(p, r);
    res.area = area_term(p, r);
    res.value = double(res.count) - res.area;
    res.boundary_gap = boundary_gap(p, r);
    res.boundary_flag = res.boundary_gap < 1e-9 * r;
    return res;
}

// Distorted angle of a lattice point on the shell s = |n|_p^p.
inline double shell_angle(const LatticePoint& n, double s, PExponent p) {
    double u1 = detail::pq_power(double(std::abs(n.n1)), p.q) / s;
    double u2 = detail::pq_power(double(std::abs(n.n2)), p.q) / s;
    double c = std::copysign(std::sqrt(u1), double(n.n1));
    double sn = std::copysign(std::sqrt(u2), double(n.n2));
    double phi = std::atan2(sn, c);
    if (phi < 0.0) phi += 2.0 * std::numbers::pi;
    return phi;
}

// All shells with 1 <= s <= s_max, ascending in s; within a shell points are
// lexicographic in (n1, n2). Two points share a shell when their s values
// agree to 1e-9 relative.
inline std::vector<Shell> enumerate_shells(PExponent p, double s_max) {
    if (!(s_max >= 1.0))
        throw std::invalid_argument("enumerate_shells: s_max must be >= 1");
    const int q = p.q;
    // |n1| <= s_max^{q/2}
    double rad_est = std::pow(s_max, double(q) / 2.0);
    if (area_term(p, std::pow(s_max, 1.0 / p.p())) > 2e7)
        throw std::invalid_argument("enumerate_shells: shell set too large to materialize");
    std::int64_t nmax = std::int64_t(rad_est) + 2;
    struct Entry { double s; LatticePoint n; };
    std::vector<Entry> entries;
    const double tol = 1e-9;
    for (std::int64_t n1 = -nmax; n1 <= nmax; ++n1) {
        double a = detail::pq_power(double(std::llabs(n1)), q);
        if (a > s_max * (1.0 + tol)) continue;
        for (std::int64_t n2 = -nmax;; ++n2) {
            if (n2 > nmax) break;
            if (n1 == 0 && n2 == 0) continue;
            double s = a + detail::pq_power(double(std::llabs(n2)), q);
            if (s <= s_max * (1.0 + tol) && s >= 1.0 - tol)
                entries.push_back({s, {n1, n2}});
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.s != b.s) return a.s < b.s;
        return a.n < b.n;
    });
    std::vector<Shell> shells;
    for (const auto& e : entries) {
        if (shells.empty() || std::abs(e.s - shells.back().s) > tol * std::max(1.0, shells.back().s)) {
            // drop points that slipped past s_max through the tolerance band
            if (e.s > s_max && std::abs(e.s - s_max) > tol * std::max(1.0, s_max)) continue;
            shells.push_back({e.s, {}, {}});
        }
        shells.back().points.push_back(e.n);
    }
    for (auto& sh : shells) {
        std::sort(sh.points.begin(), sh.points.end());
        sh.angles.reserve(sh.points.size());
        for (const auto& n : sh.points) sh.angles.push_back(shell_angle(n, sh.s, p));
    }
    return shells;
}

// Multiplicity of the shell through a given lattice point, counted directly
// by a row scan (no full enumeration). Returns {s, count}.
inline std::pair<double, std::int64_t> shell_multiplicity(PExponent p, LatticePoint seed) {
    const int q = p.q;
    if (seed.n1 == 0 && seed.n2 == 0)
        throw std::invalid_argument("shell_multiplicity: origin has no shell");
    const double s = detail::s_value(seed.n1, seed.n2, q);
    const double tol = 1e-9 * std::max(1.0, s);
    std::int64_t count = 0;
    std::int64_t nmax = std::int64_t(std::pow(s, double(q) / 2.0)) + 2;
    for (std::int64_t n1 = 0; n1 <= nmax; ++n1) {
        double a = detail::pq_power(double(n1), q);
        if (a > s + tol) break;
        double rem = s - a;
        // candidates near rem^{q/2}
        double est = rem <= 0.0 ? 0.0 : std::pow(rem, double(q) / 2.0);
        std::int64_t base = std::int64_t(est);
        for (std::int64_t n2 = std::max<std::int64_t>(0, base - 2); n2 <= base + 2; ++n2) {
            if (std::abs(detail::s_value(n1, n2, q) - s) <= tol) {
                int sym = 4;
                if (n1 == 0 || n2 == 0) sym = 2; // (±n1, ±n2) halves collapse
                if (n1 == 0 && n2 == 0) sym = 1;
                count += sym;
            }
        }
    }
    return {s, count};
}

// R(k) = #{n in Z^2 : |n|^2 = k}.
inline std::int64_t r2_function(std::int64_t k) {
    if (k < 1) throw std::domain_error("r2_function: k must be >= 1");
    std::int64_t count = 0;
    std::int64_t amax = std::int64_t(std::sqrt(double(k))) + 1;
    while (amax * amax > k) --amax;
    for (std::int64_t a = 0; a <= amax; ++a) {
        std::int64_t rem = k - a * a;
        std::int64_t b = std::int64_t(std::sqrt(double(rem)));
        while (b * b > rem) --b;
        while ((b + 1) * (b + 1) <= rem) ++b;
        if (b * b == rem) {
            int sym = 4;
            if (a == 0 || b == 0) sym = 2;
            count += sym;
        }
    }
    return count;
}

} // namespace pcircle
