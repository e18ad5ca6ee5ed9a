#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pcircle/dd.hpp"
#include "pcircle/numkernel.hpp"
#include "pcircle/pgeom.hpp"

// Generalized Bessel functions for p = 2/q: J_omega^[p] on R^2 and its
// one-variable restriction at a fixed distorted angle. Two independent
// evaluation paths are kept: the double power series (summed diagonally with
// double-double terms) and the defining integral (oscillatory quadrature).

namespace pcircle {

struct GenBesselParams {
    PExponent p;
    double omega = 0.0;

    GenBesselParams(PExponent p_, double omega_) : p(p_), omega(omega_) {
        if (omega < 0.0) throw std::invalid_argument("GenBesselParams: omega must be >= 0");
    }
};

enum class EvalMode { series, integral, auto_switch };

struct EvalPath {
    EvalMode mode = EvalMode::auto_switch;
    double series_arg_limit = 18.0; // beyond this |x|_p the integral path is authoritative

    void validate() const {
        if (!(series_arg_limit > 0.0))
            throw std::invalid_argument("EvalPath: series_arg_limit must be > 0");
    }
};

namespace detail {

// Beyond this value of |x1|+|x2| the alternating series sheds more digits
// than the double-double accumulator can cover.
inline constexpr double kSeriesHardLimit = 44.0;

inline double gamma_q_half(int q) {
    switch (q) {
        case 1: return 1.7724538509055160273; // sqrt(pi)
        case 2: return 1.0;
        case 3: return 0.8862269254527580137; // sqrt(pi)/2
        case 4: return 1.0;
        default: return std::tgamma(double(q) / 2.0);
    }
}

// t^{q/2} with integer q (exact half powers).
inline double pow_q_half(double t, int q) {
    double root = std::sqrt(t);
    double v = 1.0;
    double base = (q % 2 == 0) ? t : root;
    int e = (q % 2 == 0) ? q / 2 : q;
    if (q % 2 == 0) {
        for (int i = 0; i < e; ++i) v *= base;
        return v;
    }
    for (int i = 0; i < e; ++i) v *= base;
    return v;
}

inline double powi(double x, int n) {
    double r = 1.0, b = x;
    while (n > 0) {
        if (n & 1) r *= b;
        b *= b;
        n >>= 1;
    }
    return r;
}

// ratio u(i+1)/u(i) for u(i) = Gamma((2i+1) q/2) z^2i / (2i)!; the gamma
// argument advances by exactly q, so the ratio is a finite product of
// exactly representable factors.
inline dd seq_ratio(int q, int i, dd z_sq) {
    dd num = z_sq;
    double base = (2.0 * double(i) + 1.0) * (double(q) / 2.0);
    for (int j = 0; j < q; ++j) num = num * (base + double(j));
    double den = (2.0 * double(i) + 1.0) * (2.0 * double(i) + 2.0);
    return num / den;
}

// Gamma(q(k+1)+omega) / Gamma(qk+omega): product of q factors qk+omega+j.
inline dd outer_gamma_step(int q, double omega, int k) {
    dd prod(1.0);
    for (int j = 0; j < q; ++j)
        prod = prod * (two_sum(double(q) * double(k), omega) + double(j));
    return prod;
}

struct SeriesEval {
    double value = 0.0;
    int diagonals_used = 0;
    double tail_bound = 0.0;
};

} // namespace detail

// Rigorous bound on the absolute truncation tail of the series after summing
// the first `terms_used` diagonals: 4 C(omega) |x|_p^omega / (p^{omega+2}
// Gamma(2/p)) times the remainder of the even exponential series in
// |x1| + |x2|, with C(omega) = 1/(omega Gamma(omega)) for omega > 0, else 1.
inline double truncation_bound(const GenBesselParams& params, double x1, double x2,
                               int terms_used) {
    if (terms_used < 0) throw std::invalid_argument("truncation_bound: terms_used must be >= 0");
    const double p = params.p.p();
    const double omega = params.omega;
    const double rp = p_norm(x1, x2, params.p);
    const double c_omega = omega > 0.0 ? std::exp(-log_gamma(omega + 1.0)) : 1.0;
    const double pref =
        4.0 * c_omega * (omega > 0.0 ? std::pow(rp, omega) : 1.0) /
        (std::pow(p, omega + 2.0) * std::tgamma(2.0 / p));
    const double z = std::abs(x1) + std::abs(x2);
    if (z == 0.0) return terms_used == 0 ? pref : 0.0;
    // remainder sum_{j >= t} z^{2j} / (2j)! plus a geometric cover of its tail
    const int t = terms_used;
    double term = (t == 0) ? 1.0
                           : std::exp(2.0 * double(t) * std::log(z) - std::lgamma(2.0 * t + 1.0));
    double sum = term;
    double ratio = 0.0;
    int j = t;
    for (int it = 0; it < 600; ++it) {
        ratio = z * z / ((2.0 * j + 1.0) * (2.0 * j + 2.0));
        term *= ratio;
        ++j;
        sum += term;
        if (term < 1e-300 || (ratio < 0.5 && term < 1e-18 * sum)) break;
    }
    if (ratio < 1.0) sum += term * ratio / (1.0 - ratio);
    return pref * sum;
}

namespace detail {

// Diagonal-by-k summation of the double series. Terms are generated by
// exact-ratio recurrences in double-double; seed gamma values enter as a
// uniform factor only, so the cancellation between diagonals is resolved to
// the full width of the accumulator. `forced_diagonals`, when positive,
// sums exactly that many diagonals and skips the certification.
inline SeriesEval series_engine(const GenBesselParams& params, double x1, double x2,
                                const SeriesControl& ctrl, int forced_diagonals = 0) {
    ctrl.validate();
    const int q = params.p.q;
    const double p = params.p.p();
    const double omega = params.omega;
    double z1 = std::abs(x1), z2 = std::abs(x2);
    if (z1 < z2) std::swap(z1, z2); // value is swap-invariant; keep z2 the small one
    const double z = z1 + z2;
    if (z > kSeriesHardLimit)
        throw path_refused_error("gen_bessel_series: |x1|+|x2| beyond the validated series range");
    const double rp = p_norm(x1, x2, params.p);

    if (rp == 0.0 && omega > 0.0) return {0.0, 0, 0.0};

    const double g_half = gamma_q_half(q);
    const double pref = (omega > 0.0 ? std::pow(rp / p, omega) : 1.0) * (double(q) * double(q)) /
                        (g_half * g_half);

    const dd z1_sq = two_prod(z1, z1);
    const dd z2_sq = two_prod(z2, z2);
    const dd gh(g_half);
    const dd outer_seed(std::tgamma(double(q) + omega)); // GammaOuter(0)

    const int kmax = forced_diagonals > 0 ? forced_diagonals : ctrl.max_terms;
    int k_used = 0;
    double bound = truncation_bound(params, x1, x2, 0);
    dd_sum total;
    double plain = 0.0; // accumulator when compensation is switched off
    auto accumulate = [&](dd diag, int k) {
        if (ctrl.compensated)
            total.add((k & 1) ? -diag : diag);
        else
            plain += (k & 1) ? -double(diag) : double(diag);
    };
    auto result = [&] { return ctrl.compensated ? total.result() : plain; };

    if (z2 == 0.0) {
        // single-column series (covers the axis points and the origin)
        dd col = gh / outer_seed; // u(0)/GammaOuter(0)
        for (int k = 0; k < kmax; ++k) {
            if (k > 0) col = (col * seq_ratio(q, k - 1, z1_sq)) / outer_gamma_step(q, omega, k);
            accumulate(gh * col, k);
            k_used = k + 1;
            bound = truncation_bound(params, x1, x2, k_used);
            if (forced_diagonals == 0 && bound <= ctrl.tail_tol)
                return {pref * result(), k_used, bound};
        }
    } else {
        std::vector<dd> ru, rv; // cached sequence ratios for z1 and z2
        dd R = gh / outer_seed; // u(0)/GammaOuter(0)
        for (int k = 0; k < kmax; ++k) {
            if (k > 0) {
                rv.push_back(seq_ratio(q, k - 1, z2_sq));
                ru.push_back(seq_ratio(q, k - 1, z1_sq));
                R = (R * ru[k - 1]) / outer_gamma_step(q, omega, k);
            }
            // walk each diagonal from the z1-heavy corner so the leading
            // contribution is captured before the terms shrink (z1 >= z2;
            // the far corner may underflow harmlessly)
            dd w = R * gh; // w(k, 0) = u(k) v(0) / GammaOuter(k)
            dd diag = w;
            for (int m2 = 1; m2 <= k; ++m2) {
                w = (w * rv[m2 - 1]) / ru[k - m2];
                if (w.hi == 0.0) break;
                diag = diag + w;
            }
            accumulate(diag, k);
            k_used = k + 1;
            bound = truncation_bound(params, x1, x2, k_used);
            if (forced_diagonals == 0 && bound <= ctrl.tail_tol)
                return {pref * result(), k_used, bound};
        }
    }
    if (forced_diagonals > 0) return {pref * result(), k_used, bound};
    throw non_convergence_error("gen_bessel_series: tail bound not certified within max_terms",
                                pref * result());
}

} // namespace detail

// J_omega^[p](x) by the double power series, diagonals ascending in k with
// compensated accumulation; the truncation tail is certified below
// ctrl.tail_tol through truncation_bound.
inline double gen_bessel_series(const GenBesselParams& params, double x1, double x2,
                                const SeriesControl& ctrl = {}) {
    return detail::series_engine(params, x1, x2, ctrl).value;
}

// Series truncated at exactly `diagonals` leading diagonals (for tail
// measurements against the certified bound).
inline double gen_bessel_series_truncated(const GenBesselParams& params, double x1, double x2,
                                          int diagonals) {
    if (diagonals < 1) throw std::invalid_argument("gen_bessel_series_truncated: diagonals >= 1");
    SeriesControl ctrl;
    ctrl.max_terms = diagonals;
    return detail::series_engine(params, x1, x2, ctrl, diagonals).value;
}

namespace detail {

// theta-substituted defining integral for omega = 0:
//   J_0^[p](x) = C_p int_0^{pi/2} cos(x1 sin^q th) cos(x2 cos^q th)
//                                 2 (sin th cos th)^{q-1} dth
// The substitution t = sin^2 th turns the beta-type endpoint weights into an
// analytic integrand for every integer q.
template <typename Spec>
inline QuadratureResult j0_theta_integral(int q, double x1, double x2, const Spec& spec) {
    const double g_half = gamma_q_half(q);
    const double cp = double(q) * double(q) / (g_half * g_half);
    auto f = [&](double th) {
        double s = std::sin(th), c = std::cos(th);
        return cp * std::cos(x1 * powi(s, q)) * std::cos(x2 * powi(c, q)) * 2.0 *
               powi(s * c, q - 1);
    };
    long panels = std::max<long>(2, long((std::abs(x1) + std::abs(x2)) / 4.0));
    return composite_gl_adaptive(f, 0.0, 0.5 * std::numbers::pi, spec, panels);
}

} // namespace detail

namespace detail {

// Integral-path evaluation with quadrature diagnostics attached: the
// oscillatory cosine-product integral at omega = 0, lifted to omega > 0
// through the order-raising integral with kernel u^{q-1} (1-u)^{omega-1}
// after u = tau^p.
inline QuadratureResult gen_bessel_integral_result(const GenBesselParams& params, double x1,
                                                   double x2, const QuadratureSpec& quad) {
    quad.validate();
    const int q = params.p.q;
    const double p = params.p.p();
    const double omega = params.omega;
    if (omega == 0.0) return j0_theta_integral(q, x1, x2, quad);
    const double rp = p_norm(x1, x2, params.p);
    if (rp == 0.0) return {0.0, 0.0, 0, true};
    QuadratureSpec inner = quad;
    inner.abs_tol = std::max(quad.abs_tol * 0.05, 1e-15);
    inner.rel_tol = std::max(quad.rel_tol * 0.05, 1e-15);
    long inner_nodes = 0;
    auto f2 = [&](double /*u*/, double dl, double dr) {
        double scale = pow_q_half(dl, q); // u^{1/p}
        auto res = j0_theta_integral(q, scale * x1, scale * x2, inner);
        inner_nodes += res.nodes_used;
        return powi(dl, q - 1) * std::pow(dr, omega - 1.0) * res.value;
    };
    auto res = tanh_sinh(f2, 0.0, 1.0, quad);
    const double pref = std::pow(rp, omega) / (std::pow(p, omega) * std::tgamma(omega));
    res.value *= pref;
    res.error_estimate *= std::abs(pref);
    res.nodes_used += inner_nodes;
    return res;
}

} // namespace detail

// J_omega^[p](x) by the defining integrals.
inline double gen_bessel_integral(const GenBesselParams& params, double x1, double x2,
                                  const QuadratureSpec& quad) {
    auto res = detail::gen_bessel_integral_result(params, x1, x2, quad);
    if (!res.converged)
        throw non_convergence_error("gen_bessel_integral: quadrature stalled", res.value);
    return res.value;
}

// scriptJ_{omega,phi}^[p](r): the restriction of J_omega^[p] along a fixed
// distorted angle; series and integral modes go through the mapped Cartesian
// point, auto mode switches paths at series_arg_limit.
inline double script_j(const GenBesselParams& params, double phi, double r, const EvalPath& path,
                       const SeriesControl& ctrl, const QuadratureSpec& quad) {
    if (r < 0.0) throw std::domain_error("script_j: r must be >= 0");
    path.validate();
    auto [x1, x2] = from_distorted_polar({r, phi}, params.p);
    switch (path.mode) {
        case EvalMode::series: return gen_bessel_series(params, x1, x2, ctrl);
        case EvalMode::integral: return gen_bessel_integral(params, x1, x2, quad);
        case EvalMode::auto_switch:
        default:
            return r <= path.series_arg_limit ? gen_bessel_series(params, x1, x2, ctrl)
                                              : gen_bessel_integral(params, x1, x2, quad);
    }
}

namespace detail {

// G(c) = int_0^1 tau cos(c tau) dtau = (cos c + c sin c - 1)/c^2; the closed
// form cancels near c = 0, so small arguments use the Maclaurin series
// G(c) = sum_k (-1)^k (2k+1) c^{2k} / (2k+2)!.
inline double tau_cos_moment(double c) {
    if (std::abs(c) < 0.5) {
        double c2 = c * c;
        double g = 0.5, num = 1.0;
        for (int k = 1; k <= 9; ++k) {
            num *= -c2;
            g += num * (2.0 * k + 1.0) / std::tgamma(2.0 * k + 3.0);
        }
        return g;
    }
    return (std::cos(c) + c * std::sin(c) - 1.0) / (c * c);
}

// scriptJ_{1,phi}(rho) with the inner tau-integral of the order-raising
// recurrence done in closed form after exchanging the integration order:
//   rho C_p int (sin th cos th)^{q-1} [G(rho(A+B)) + G(rho(A-B))] dth,
// A = a1 sin^q th, B = a2 cos^q th, a_i the distorted direction cosines.
inline QuadratureResult scriptj1_swap_core(int q, double a1, double a2, double rho,
                                           const QuadratureSpec& quad) {
    const double g_half = gamma_q_half(q);
    const double cp = double(q) * double(q) / (g_half * g_half);
    auto f = [&](double th) {
        double s = std::sin(th), c = std::cos(th);
        double A = a1 * powi(s, q), B = a2 * powi(c, q);
        return powi(s * c, q - 1) * (tau_cos_moment(rho * (A + B)) + tau_cos_moment(rho * (A - B)));
    };
    long panels = std::max<long>(2, long(rho * (a1 + a2) / 4.0));
    auto res = composite_gl_adaptive(f, 0.0, 0.5 * std::numbers::pi, quad, panels);
    res.value *= rho * cp;
    res.error_estimate *= rho * cp;
    return res;
}

} // namespace detail

// Order-1 restriction built from order-0 integral-path evaluations through
// scriptJ_{1,phi}(r) = r int_0^1 tau scriptJ_{0,phi}(tau r) dtau; the tau
// integral is exact, leaving a single oscillatory quadrature in theta.
inline double script_j_order1_large_arg(PExponent p, double phi, double r,
                                        const QuadratureSpec& quad) {
    if (!(r > 0.0)) throw std::domain_error("script_j_order1_large_arg: r must be > 0");
    const int q = p.q;
    double a1 = detail::powi(std::abs(std::cos(phi)), q);
    double a2 = detail::powi(std::abs(std::sin(phi)), q);
    auto res = detail::scriptj1_swap_core(q, a1, a2, r, quad);
    if (!res.converged)
        throw non_convergence_error("script_j_order1_large_arg: quadrature stalled", res.value);
    return res.value;
}

// ---------------------------------------------------------------------------
// Phi_{k,phi}^[p]
// ---------------------------------------------------------------------------

// Per-k coefficient tables of Phi_{k,phi}^[p]; the phi dependence enters only
// through powers of |cos phi|^{4/p} and |sin phi|^{4/p}.
struct PhiCoefficients {
    PExponent p;
    std::vector<std::vector<double>> coeff; // coeff[k][n]

    double eval(int k, double phi) const {
        if (k < 0 || k >= int(coeff.size()))
            throw std::out_of_range("PhiCoefficients: k outside cached range");
        const int q = p.q;
        // |cos phi|^{4/p} = (cos^2 phi)^q
        double c2 = std::cos(phi) * std::cos(phi);
        double s2 = std::sin(phi) * std::sin(phi);
        double A = detail::powi(c2, q);
        double B = detail::powi(s2, q);
        double sum = 0.0;
        for (int n = 0; n <= k; ++n)
            sum += coeff[k][n] * detail::powi(A, n) * detail::powi(B, k - n);
        return sum;
    }
};

// All gamma and factorial products of the closed form are combined in
// log-space and exponentiated once per (k, n); the beta-function ratio for
// p = 2 cancels exactly, which keeps the angular invariance tight.
inline PhiCoefficients make_phi_coefficients(PExponent p, int k_max) {
    if (k_max < 0) throw std::invalid_argument("make_phi_coefficients: k_max must be >= 0");
    const double q = double(p.q);
    PhiCoefficients table{p, {}};
    table.coeff.resize(k_max + 1);
    for (int k = 0; k <= k_max; ++k) {
        table.coeff[k].resize(k + 1);
        for (int n = 0; n <= k; ++n) {
            double m = double(k - n);
            double lg = log_gamma(double(k) + 1.0) - log_gamma(double(n) + 1.0) -
                        log_gamma(m + 1.0) + log_gamma(q * (double(n) + 0.5)) +
                        log_gamma(q * (m + 0.5)) - log_gamma(double(n) + 0.5) -
                        log_gamma(m + 0.5);
            table.coeff[k][n] = std::exp(lg);
        }
    }
    return table;
}

inline double phi_coefficient(PExponent p, int k, double phi) {
    if (k < 0) throw std::invalid_argument("phi_coefficient: k must be >= 0");
    return make_phi_coefficients(p, k).eval(k, phi);
}

// Direct inner diagonal sum of the series representation,
//   (k! 2^{2k} / pi) sum_{|m|'=k} Gamma((2m+1)/p) / (2m)! |cos^{m1} sin^{m2}|^{4/p},
// kept as an independent route for consistency checks against the closed form.
inline double phi_coefficient_from_series(PExponent p, int k, double phi) {
    const int q = p.q;
    const double c2 = std::cos(phi) * std::cos(phi);
    const double s2 = std::sin(phi) * std::sin(phi);
    // |cos phi|^{4/p * m1} = (c2)^{q m1}
    dd_sum sum;
    for (int m1 = 0; m1 <= k; ++m1) {
        int m2 = k - m1;
        double lg = log_gamma(q * (2.0 * m1 + 1.0) / 2.0) + log_gamma(q * (2.0 * m2 + 1.0) / 2.0) -
                    log_gamma(2.0 * m1 + 1.0) - log_gamma(2.0 * m2 + 1.0);
        double ang = (m1 > 0 ? double(q) * m1 * std::log(c2) : 0.0) +
                     (m2 > 0 ? double(q) * m2 * std::log(s2) : 0.0);
        if (m1 > 0 && c2 == 0.0) continue;
        if (m2 > 0 && s2 == 0.0) continue;
        sum.add(std::exp(lg + ang));
    }
    // scale k! 2^{2k} / pi; the power of two goes through ldexp exactly
    double scale = std::exp(log_gamma(double(k) + 1.0)) / std::numbers::pi;
    return std::ldexp(sum.result() * scale, 2 * k);
}

// Inequality between gamma-function ratios used by the compact-convergence
// bound: Gamma(n+k/2) Gamma(m+k/2) / Gamma(n+m+k) <= Gamma(k/2)^2 / Gamma(k),
// tested in log-space with 1e-9 relative slack.
inline bool gamma_ratio_inequality_check(int k, int n, int m) {
    if (k < 1) throw std::invalid_argument("gamma_ratio_inequality_check: k must be >= 1");
    if (n < 0 || m < 0)
        throw std::invalid_argument("gamma_ratio_inequality_check: n, m must be >= 0");
    double lhs = log_gamma(n + k / 2.0) + log_gamma(m + k / 2.0) - log_gamma(double(n + m + k));
    double rhs = 2.0 * log_gamma(k / 2.0) - log_gamma(double(k));
    return lhs <= rhs + 1e-9 * std::max(1.0, std::abs(rhs));
}

} // namespace pcircle
