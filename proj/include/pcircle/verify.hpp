#pragma once

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "pcircle/erdkober.hpp"
#include "pcircle/genbessel.hpp"
#include "pcircle/hardy.hpp"
#include "pcircle/numkernel.hpp"
#include "pcircle/parallel.hpp"
#include "pcircle/pgeom.hpp"

// Self-contained invariant suites behind the `verify` subcommand. Each check
// re-derives its expectation from an independent route (brute force, a second
// algebraic form, a frozen closed form); reports carry no timing so repeated
// runs are byte-identical.

namespace pcircle::verify {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SuiteResult {
    std::string module;
    std::vector<CheckResult> checks;
};

namespace detail {

inline std::string fmt(const char* pattern, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), pattern, a, b);
    return buf;
}

} // namespace detail

// O(R^2) brute-force strict-interior count over the full square, independent
// of the row scan but sharing the canonical point predicate.
inline std::int64_t count_brute_force(PExponent p, double r) {
    const int q = p.q;
    const double thr = pcircle::detail::pq_power(r, q);
    const auto thr_dd = pcircle::detail::pq_power_dd(r, q);
    // |n_i|^p < r^p forces |n_i| < r for either coordinate
    std::int64_t limit = std::int64_t(std::ceil(r)) + 2;
    std::int64_t count = 0;
    for (std::int64_t n1 = -limit; n1 <= limit; ++n1)
        for (std::int64_t n2 = -limit; n2 <= limit; ++n2)
            if (pcircle::detail::point_inside(n1, n2, q, thr, thr_dd)) ++count;
    return count;
}

inline std::int64_t r2_brute_force(std::int64_t k) {
    std::int64_t m = std::int64_t(std::sqrt(double(k))) + 2;
    std::int64_t count = 0;
    for (std::int64_t a = -m; a <= m; ++a)
        for (std::int64_t b = -m; b <= m; ++b)
            if (a * a + b * b == k) ++count;
    return count;
}

// ---------------------------------------------------------------------------
// numkernel
// ---------------------------------------------------------------------------

inline SuiteResult numkernel_suite(bool fast) {
    SuiteResult suite{"numkernel", {}};
    auto& checks = suite.checks;

    {
        std::mt19937 rng(20240817);
        std::uniform_real_distribution<double> dist(0.05, 30.0);
        double worst_sym = 0.0, worst_rec = 0.0;
        int n = fast ? 40 : 200;
        for (int i = 0; i < n; ++i) {
            double a = dist(rng), b = dist(rng);
            worst_sym = std::max(worst_sym,
                                 std::abs(beta(a, b) - beta(b, a)) / std::abs(beta(a, b)));
            worst_rec = std::max(worst_rec, std::abs(beta(a + 1.0, b) - beta(a, b) * a / (a + b)) /
                                                std::abs(beta(a + 1.0, b)));
        }
        checks.push_back({"beta_symmetry", worst_sym <= 1e-13,
                          detail::fmt("worst rel asymmetry %.3e (tol 1e-13)", worst_sym)});
        checks.push_back({"beta_recurrence", worst_rec <= 1e-12,
                          detail::fmt("worst rel residual %.3e (tol 1e-12)", worst_rec)});
    }
    {
        DiffSpec spec{1e-5, 2};
        double worst = 0.0;
        for (double r : {0.5, 1.0, 3.0, 7.7, 12.0, 16.5}) {
            double lhs =
                central_diff([](double t) { return t * classical_bessel_j(1.0, t); }, r, spec);
            worst = std::max(worst, std::abs(lhs - r * classical_bessel_j(0.0, r)));
        }
        checks.push_back({"bessel_diff_identity", worst <= 1e-8,
                          detail::fmt("worst |d/dr[r J1] - r J0| = %.3e (tol 1e-8)", worst)});
    }
    {
        double worst = 0.0;
        for (double omega : {0.0, 0.5, 1.0, 1.5, 2.0})
            for (double r = 15.0; r <= 22.0; r += fast ? 1.0 : 0.25)
                worst = std::max(worst, std::abs(pcircle::detail::bessel_j_series(omega, r) -
                                                 pcircle::detail::bessel_j_asymptotic(omega, r)));
        checks.push_back({"bessel_path_overlap", worst <= 1e-9,
                          detail::fmt("worst |series - asymptotic| = %.3e (tol 1e-9)", worst)});
    }
    {
        double worst = 0.0;
        for (int deg : {3, 7, 15, 31}) {
            double got = pcircle::detail::composite_gl_fixed(
                [deg](double t) { return std::pow(t, deg); }, 0.0, 1.0, 1);
            worst = std::max(worst, std::abs(got - 1.0 / (deg + 1.0)) * (deg + 1.0));
        }
        checks.push_back({"gl_polynomial_exactness", worst <= 1e-13,
                          detail::fmt("worst rel error %.3e (tol 1e-13)", worst)});
    }
    {
        QuadratureSpec spec;
        auto osc = integrate([](double t) { return std::cos(40.0 * std::numbers::pi * t); }, 0.0,
                             1.0, spec);
        auto sing = integrate([](double t) { return 1.0 / std::sqrt(t); }, 0.0, 1.0,
                              QuadratureSpec::for_singularity(EndpointSingularity::left));
        bool pass = osc.converged && std::abs(osc.value) <= 1e-10 && sing.converged &&
                    std::abs(sing.value - 2.0) <= 1e-11;
        checks.push_back({"quadrature_examples", pass,
                          detail::fmt("cos(40 pi t): %.3e; t^{-1/2}: 2%+.3e", osc.value,
                                      sing.value - 2.0)});
    }
    {
        std::vector<double> tiny{1.0, -1.0, 1e-16};
        std::vector<double> tenth(1'000'000, 0.1);
        bool pass = compensated_sum(tiny) == 1e-16 &&
                    std::abs(compensated_sum(tenth) - 1e5) <= 1e-9 &&
                    compensated_sum(std::vector<double>{}) == 0.0;
        checks.push_back({"compensated_sum_examples", pass,
                          detail::fmt("1e6 x 0.1 -> 1e5 %+.3e", compensated_sum(tenth) - 1e5)});
    }
    return suite;
}

// ---------------------------------------------------------------------------
// pgeom
// ---------------------------------------------------------------------------

inline SuiteResult pgeom_suite(bool fast) {
    SuiteResult suite{"pgeom", {}};
    auto& checks = suite.checks;

    {
        // row scan vs brute force on non-boundary radii
        std::int64_t mismatches = 0;
        double rmax = fast ? 12.0 : 30.0;
        int total = 0;
        for (int q = 1; q <= 4; ++q) {
            for (double r = 0.7; r <= rmax; r += 1.37) {
                ++total;
                if (count_lattice_points(PExponent{q}, r) != count_brute_force(PExponent{q}, r))
                    ++mismatches;
            }
        }
        checks.push_back({"count_matches_brute_force", mismatches == 0,
                          detail::fmt("%g mismatches over %g radii x 4 exponents",
                                      double(mismatches), double(total))});
    }
    {
        // shell cardinality bound, exhaustive where the shell set is small
        bool ok = true;
        double worst_ratio = 0.0;
        auto scan = [&](int q, double s_max) {
            for (const auto& sh : enumerate_shells(PExponent{q}, s_max)) {
                double bound = 4.0 * std::floor(pcircle::detail::pow_q_half(sh.s, q) + 1e-12);
                if (double(sh.points.size()) > bound) ok = false;
                worst_ratio = std::max(worst_ratio, double(sh.points.size()) / bound);
            }
        };
        scan(1, fast ? 200.0 : 1000.0);
        scan(2, fast ? 100.0 : 1000.0);
        scan(3, fast ? 20.0 : 80.0);
        scan(4, fast ? 10.0 : 30.0);
        // sampled larger shells for the fractional exponents
        for (int q : {3, 4}) {
            for (std::int64_t a = 5; a <= (fast ? 200 : 900); a += 37) {
                for (std::int64_t b : {std::int64_t(0), a / 3, a}) {
                    auto [s, count] = shell_multiplicity(PExponent{q}, {a, b});
                    if (s > 1000.0) continue;
                    double bound = 4.0 * std::floor(pcircle::detail::pow_q_half(s, q) + 1e-12);
                    if (double(count) > bound) ok = false;
                    worst_ratio = std::max(worst_ratio, double(count) / bound);
                }
            }
        }
        checks.push_back({"shell_cardinality_bound", ok,
                          detail::fmt("worst multiplicity/bound ratio %.3e", worst_ratio)});
    }
    {
        // union of shells == interior count (minus origin) at off-shell radii
        bool ok = true;
        for (int q = 1; q <= 4; ++q) {
            double s_max = fast ? 12.3 : 27.3;
            auto shells = enumerate_shells(PExponent{q}, s_max);
            std::int64_t total = 0;
            for (const auto& sh : shells) total += std::int64_t(sh.points.size());
            double radius = pcircle::detail::pow_q_half(s_max, q); // s_max^{1/p}
            std::int64_t count = count_lattice_points(PExponent{q}, radius) - 1;
            if (total != count) ok = false;
        }
        checks.push_back({"shell_union_equals_count", ok, "shells vs strict interior count"});
    }
    {
        // distorted polar round trip
        double worst = 0.0;
        for (int q = 1; q <= 4; ++q) {
            PExponent p{q};
            for (double r : {1e-3, 0.5, 1.0, 7.0, 40.0, 100.0}) {
                int nphi = fast ? 64 : 256;
                for (int i = 0; i < nphi; ++i) {
                    double phi = 2.0 * std::numbers::pi * (i + 0.5) / nphi;
                    auto [x1, x2] = from_distorted_polar({r, phi}, p);
                    auto back = to_distorted_polar(x1, x2, p);
                    worst = std::max(worst, std::abs(back.r - r) / r);
                    worst = std::max(worst, std::abs(back.phi - phi));
                    worst = std::max(worst,
                                     std::abs(p_norm(x1, x2, p) - r) / r);
                }
            }
        }
        checks.push_back({"distorted_polar_roundtrip", worst <= 1e-12,
                          detail::fmt("worst deviation %.3e (tol 1e-12)", worst)});
    }
    {
        // p = 2 shell multiplicities equal R(k)
        bool ok = true;
        auto shells = enumerate_shells(PExponent{1}, fast ? 60.0 : 200.0);
        for (const auto& sh : shells) {
            std::int64_t k = std::llround(sh.s);
            if (r2_function(k) != std::int64_t(sh.points.size())) ok = false;
        }
        checks.push_back({"r2_equals_shell_cardinality", ok, "R(k) vs p=2 shells"});
    }
    {
        bool ok = true;
        for (std::int64_t k = 1; k <= (fast ? 120 : 500); ++k)
            if (r2_function(k) != r2_brute_force(k)) ok = false;
        checks.push_back({"r2_matches_brute_force", ok, "representation counts"});
    }
    return suite;
}

// ---------------------------------------------------------------------------
// genbessel
// ---------------------------------------------------------------------------

inline SuiteResult genbessel_suite(bool fast) {
    SuiteResult suite{"genbessel", {}};
    auto& checks = suite.checks;
    SeriesControl ctrl;
    QuadratureSpec quad;
    quad.abs_tol = 1e-12;
    quad.rel_tol = 1e-12;

    {
        double worst = 0.0;
        int n = fast ? 60 : 200;
        for (double omega : {0.0, 1.0}) {
            GenBesselParams prm{PExponent{1}, omega};
            for (int i = 0; i <= n; ++i) {
                double r = 18.0 * i / n;
                double v = gen_bessel_series(prm, r, 0.0, ctrl);
                worst = std::max(worst, std::abs(v - classical_bessel_j(omega, r)));
            }
        }
        checks.push_back({"p2_collapse", worst <= 1e-10,
                          detail::fmt("worst |series - classical| = %.3e (tol 1e-10)", worst)});
    }
    {
        // series vs integral across exponents and orders
        double worst = 0.0;
        std::mt19937 rng(777);
        std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
        std::uniform_real_distribution<double> rad(0.05, 18.0);
        int n = fast ? 6 : 25;
        for (int q = 1; q <= 4; ++q) {
            PExponent p{q};
            for (double omega : {0.0, 1.0}) {
                GenBesselParams prm{p, omega};
                for (int i = 0; i < n; ++i) {
                    double rp = rad(rng), phi = ang(rng);
                    auto [x1, x2] = from_distorted_polar({rp, phi}, p);
                    double a = gen_bessel_series(prm, x1, x2, ctrl);
                    double b = gen_bessel_integral(prm, x1, x2, quad);
                    worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
                }
            }
        }
        checks.push_back({"path_agreement", worst <= 1e-8,
                          detail::fmt("worst rel disagreement %.3e (tol 1e-8)", worst)});
    }
    {
        double worst = 0.0;
        auto table = make_phi_coefficients(PExponent{1}, 30);
        for (int k = 0; k <= 30; ++k)
            for (int i = 0; i < 64; ++i) {
                double phi = 2.0 * std::numbers::pi * i / 64.0;
                worst = std::max(worst, std::abs(table.eval(k, phi) - 1.0));
            }
        checks.push_back({"phi_invariance_p2", worst <= 1e-12,
                          detail::fmt("worst |Phi - 1| = %.3e (tol 1e-12)", worst)});
    }
    {
        double worst = 0.0;
        int kmax = fast ? 10 : 20;
        for (int q : {2, 3, 4}) {
            PExponent p{q};
            auto table = make_phi_coefficients(p, kmax);
            for (int k = 0; k <= kmax; ++k)
                for (int i = 0; i < (fast ? 16 : 64); ++i) {
                    double phi = 2.0 * std::numbers::pi * (i + 0.5) / 64.0;
                    double a = table.eval(k, phi);
                    double b = phi_coefficient_from_series(p, k, phi);
                    worst = std::max(worst, std::abs(a - b) / std::abs(b));
                }
        }
        checks.push_back({"phi_consistency", worst <= 1e-11,
                          detail::fmt("worst rel gap closed form vs series %.3e (tol 1e-11)",
                                      worst)});
    }
    {
        bool ok = true;
        for (int k = 1; k <= 12; ++k)
            for (int n = 0; n <= 15; ++n)
                for (int m = 0; m <= 15; ++m)
                    if (!gamma_ratio_inequality_check(k, n, m)) ok = false;
        checks.push_back({"gamma_ratio_inequality", ok, "k <= 12, n,m <= 15"});
    }
    {
        // certified tail bound dominates the measured tail
        bool ok = true;
        double worst_margin = std::numeric_limits<double>::infinity();
        for (int q = 1; q <= 4; ++q) {
            PExponent p{q};
            for (double omega : {0.0, 1.0}) {
                GenBesselParams prm{p, omega};
                for (double x1 : {0.3, 2.0, 9.0})
                    for (double x2 : {0.0, 1.0, 6.0}) {
                        if (x1 == 0.0 && x2 == 0.0) continue;
                        for (int K : {4, 10, 20}) {
                            double full = gen_bessel_series_truncated(prm, x1, x2, 2 * K + 24);
                            double part = gen_bessel_series_truncated(prm, x1, x2, K);
                            double tail = std::abs(full - part);
                            double bound = truncation_bound(prm, x1, x2, K);
                            if (tail > bound) ok = false;
                            if (bound > 0.0)
                                worst_margin = std::min(worst_margin, bound - tail);
                        }
                    }
            }
        }
        checks.push_back({"truncation_bound_dominates", ok,
                          detail::fmt("smallest bound-tail margin %.3e", worst_margin)});
    }
    {
        // symmetry under sign flips and coordinate swap
        double worst = 0.0;
        for (int q = 1; q <= 4; ++q) {
            GenBesselParams prm{PExponent{q}, 1.0};
            double v = gen_bessel_series(prm, 2.7, 1.3, ctrl);
            worst = std::max(worst, std::abs(gen_bessel_series(prm, -2.7, 1.3, ctrl) - v));
            worst = std::max(worst, std::abs(gen_bessel_series(prm, 2.7, -1.3, ctrl) - v));
            worst = std::max(worst, std::abs(gen_bessel_series(prm, 1.3, 2.7, ctrl) - v));
        }
        checks.push_back({"argument_symmetry", worst == 0.0,
                          detail::fmt("worst |flip - base| = %.3e (exact)", worst)});
    }
    return suite;
}

// ---------------------------------------------------------------------------
// erdkober
// ---------------------------------------------------------------------------

inline SuiteResult erdkober_suite(bool fast) {
    SuiteResult suite{"erdkober", {}};
    auto& checks = suite.checks;
    QuadratureSpec quad = QuadratureSpec::for_singularity(EndpointSingularity::both);
    quad.abs_tol = 1e-12;
    quad.rel_tol = 1e-12;

    {
        double worst = 0.0;
        for (double lam : {0.0, 1.0, 2.0, 3.5})
            for (double alpha : {0.25, 0.5, 1.0, 1.5})
                for (double eta : {-0.5, 0.0, 1.0})
                    for (double p : {2.0, 1.0, 2.0 / 3.0, 0.5})
                        for (double r : {0.5, 1.0, 2.0}) {
                            if (fast && (lam == 2.0 || alpha == 1.0 || r == 1.0)) continue;
                            EKParams prm{alpha, eta, p};
                            double got = ek_integral(
                                [lam](double t) { return std::pow(t, lam); }, prm, r, quad);
                            double expect = std::exp(log_gamma(eta + lam / p + 1.0) -
                                                     log_gamma(eta + lam / p + alpha + 1.0)) *
                                            std::pow(r, lam);
                            worst = std::max(worst, std::abs(got - expect) / std::abs(expect));
                        }
        checks.push_back({"monomial_eigenrelation", worst <= 1e-8,
                          detail::fmt("worst rel error %.3e (tol 1e-8)", worst)});
    }
    {
        double worst = 0.0;
        for (double lam : {0.0, 1.0, 3.5})
            for (double alpha : {0.25, 0.5, 0.75})
                for (double eta : {-0.5, 0.0, 1.0})
                    for (double p : {2.0, 1.0, 0.5})
                        for (double r : {0.5, 2.0}) {
                            if (fast && (alpha == 0.5 || eta == 0.0)) continue;
                            EKParams prm{alpha, eta, p};
                            auto f = [lam](double t) { return std::pow(t, lam); };
                            auto If = [&](double rr) { return ek_integral(f, prm, rr, quad); };
                            double got = ek_derivative(If, prm, r, quad, ek_diff_spec(r));
                            worst = std::max(worst, std::abs(got - std::pow(r, lam)) /
                                                        std::pow(r, lam));
                        }
        checks.push_back({"derivative_inverts_integral", worst <= 1e-5,
                          detail::fmt("worst rel error %.3e (tol 1e-5)", worst)});
    }
    {
        // action on the fixed-angle restriction: I scriptJ_w = (p/r)^g scriptJ_{w+g}
        double worst = 0.0;
        EvalPath path;
        SeriesControl ctrl;
        for (int q : {1, 2, 3})
            for (double g : {0.5, 1.0})
                for (double w : {0.0, 0.5, 1.0})
                    for (double r : {0.5, 2.0, 8.0})
                        for (int i = 0; i < (fast ? 2 : 8); ++i) {
                            double phi = 2.0 * std::numbers::pi * (i + 0.37) / 8.0;
                            PExponent P{q};
                            double p = P.p();
                            EKParams prm{g, (1.0 - 1.0 / p) * w + 2.0 / p - 1.0, p};
                            GenBesselParams base{P, w}, up{P, w + g};
                            auto f = [&](double t) {
                                return script_j(base, phi, t, path, ctrl, quad);
                            };
                            double lhs = ek_integral(f, prm, r, quad);
                            double rhs = std::pow(p / r, g) * script_j(up, phi, r, path, ctrl, quad);
                            worst = std::max(worst,
                                             std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
                        }
        checks.push_back({"action_on_scriptj", worst <= 1e-6,
                          detail::fmt("worst rel error %.3e (tol 1e-6)", worst)});
    }
    {
        double worst = 0.0;
        EvalPath path;
        SeriesControl ctrl;
        for (int q : {1, 2, 3, 4})
            for (double g : {0.5, 1.0})
                for (double w : {0.0, 1.0}) {
                    if (fast && g == 0.5) continue;
                    PExponent P{q};
                    double lhs = integral_recurrence_J(P, w, g, 3.0, 1.7, quad);
                    double rhs = gen_bessel_series(GenBesselParams{P, w + g}, 3.0, 1.7, ctrl);
                    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
                    double lhs2 = integral_recurrence_scriptJ(P, w, g, 0.6, 4.0, quad);
                    double rhs2 =
                        script_j(GenBesselParams{P, w + g}, 0.6, 4.0, path, ctrl, quad);
                    worst = std::max(worst, std::abs(lhs2 - rhs2) / std::max(1.0, std::abs(rhs2)));
                }
        checks.push_back({"order_raising_recurrences", worst <= 1e-7,
                          detail::fmt("worst rel error %.3e (tol 1e-7)", worst)});
    }
    {
        double worst = 0.0;
        for (int q : {1, 2, 3, 4})
            for (double w : {0.0, 1.0, 2.0})
                for (double r : {0.5, 2.0, 8.0})
                    for (int i = 0; i < (fast ? 3 : 16); ++i) {
                        double phi = 2.0 * std::numbers::pi * (i + 0.21) / 16.0;
                        worst = std::max(worst, diff_formula_residual(PExponent{q}, w, phi, r,
                                                                      ek_diff_spec(r)));
                    }
        checks.push_back({"order_lowering_differential", worst <= 1e-6,
                          detail::fmt("worst residual %.3e (tol 1e-6)", worst)});
    }
    {
        // multivariable operator: on f = 1 a beta ratio, on J the order shift
        double worst = 0.0;
        auto fone = [](double, double) { return 1.0; };
        double got = multivar_ek(fone, 0.5, 0.25, 0.75, 1.0, 2.0, quad);
        double expect = std::exp(log_gamma(1.25) - log_gamma(2.0));
        worst = std::max(worst, std::abs(got - expect) / expect);
        SeriesControl ctrl;
        for (int q : {1, 2, 3}) {
            PExponent P{q};
            double p = P.p(), w = 1.0, g = 0.5;
            GenBesselParams base{P, w}, up{P, w + g};
            auto fJ = [&](double y1, double y2) { return gen_bessel_series(base, y1, y2, ctrl); };
            double lhs = multivar_ek(fJ, 1.0 / p, (1.0 - 1.0 / p) * w + 2.0 / p - 1.0, g, 2.0,
                                     1.0, quad);
            double rp = p_norm(2.0, 1.0, P);
            double rhs = std::pow(p / rp, g) * gen_bessel_series(up, 2.0, 1.0, ctrl);
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
        }
        checks.push_back({"multivariable_operator", worst <= 1e-6,
                          detail::fmt("worst rel error %.3e (tol 1e-6)", worst)});
    }
    return suite;
}

// ---------------------------------------------------------------------------
// hardy
// ---------------------------------------------------------------------------

inline SuiteResult hardy_suite(bool fast) {
    SuiteResult suite{"hardy", {}};
    auto& checks = suite.checks;

    {
        double worst = 0.0;
        for (double r : {0.8, 1.5, 2.3})
            for (double T : {10.0, 100.0, fast ? 300.0 : 1000.0}) {
                HardySumConfig cfg{PExponent{1}, r, T};
                double a = hardy_partial_sum(cfg);
                double b = classical_hardy_sum(r, std::int64_t(T));
                worst = std::max(worst, std::abs(a - b) / (1.0 + std::abs(a)));
            }
        checks.push_back({"p2_equivalence", worst <= 1e-9,
                          detail::fmt("worst rel gap general vs classical %.3e (tol 1e-9)",
                                      worst)});
    }
    {
        // per-shell p=2 contribution equals r R(s)/sqrt(s) J1(2 pi sqrt(s) r)
        double worst = 0.0;
        HardySumConfig cfg{PExponent{1}, 1.1, fast ? 30.0 : 60.0};
        auto contrib = pcircle::detail::hardy_shell_contributions(cfg);
        for (const auto& c : contrib) {
            std::int64_t k = std::llround(c.s);
            double sq = std::sqrt(c.s);
            double expect = double(r2_function(k)) / sq *
                            classical_bessel_j(1.0, 2.0 * std::numbers::pi * sq * cfg.r);
            worst = std::max(worst, std::abs(c.value - expect));
        }
        checks.push_back({"p2_summand_formula", worst <= 1e-10,
                          detail::fmt("worst summand deviation %.3e (tol 1e-10)", worst)});
    }
    {
        // bit-for-bit determinism across repeated runs and thread counts
        HardySumConfig cfg{PExponent{2}, 0.75, fast ? 40.0 : 80.0};
        std::vector<double> sched{cfg.s_max * 0.5, cfg.s_max * 0.75, cfg.s_max};
        int ambient = max_threads();
        set_max_threads(1);
        auto t1 = convergence_trace(cfg, sched, 2);
        auto t1b = convergence_trace(cfg, sched, 2);
        set_max_threads(2);
        auto t2 = convergence_trace(cfg, sched, 2);
        set_max_threads(ambient);
        bool ok = t1.tail_average == t1b.tail_average && t1.tail_average == t2.tail_average;
        for (std::size_t i = 0; i < sched.size(); ++i) {
            ok = ok && t1.checkpoints[i].partial_sum == t2.checkpoints[i].partial_sum;
            ok = ok && t1.checkpoints[i].partial_sum == t1b.checkpoints[i].partial_sum;
            ok = ok && t1.checkpoints[i].residual ==
                           t1.checkpoints[i].partial_sum - t1.checkpoints[i].direct_error_term;
        }
        checks.push_back({"summation_determinism", ok,
                          "identical partial sums across reruns and thread counts"});
    }
    {
        // single-shell trace: partial sum r 4 J1(2 pi r) at s_max = 1
        double r = 0.35;
        HardySumConfig cfg{PExponent{1}, r, 1.0};
        double got = hardy_partial_sum(cfg);
        double expect = r * 4.0 * classical_bessel_j(1.0, 2.0 * std::numbers::pi * r);
        checks.push_back({"single_shell_value", std::abs(got - expect) <= 1e-12,
                          detail::fmt("|got - r 4 J1| = %.3e (tol 1e-12)",
                                      std::abs(got - expect))});
    }
    return suite;
}

inline std::vector<SuiteResult> run_suites(const std::string& filter, bool fast) {
    std::vector<SuiteResult> out;
    auto want = [&](const char* name) {
        return filter.empty() || filter == name;
    };
    if (want("numkernel")) out.push_back(numkernel_suite(fast));
    if (want("pgeom")) out.push_back(pgeom_suite(fast));
    if (want("genbessel")) out.push_back(genbessel_suite(fast));
    if (want("erdkober")) out.push_back(erdkober_suite(fast));
    if (want("hardy")) out.push_back(hardy_suite(fast));
    return out;
}

} // namespace pcircle::verify
