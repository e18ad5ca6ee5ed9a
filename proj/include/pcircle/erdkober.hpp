#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pcircle/genbessel.hpp"
#include "pcircle/numkernel.hpp"
#include "pcircle/pgeom.hpp"

// Erdelyi-Kober fractional integral and derivative with lower limit 0, the
// composition identity between them, and the order-raising integral /
// order-lowering differential recurrences they induce on the generalized
// Bessel functions.

namespace pcircle {

// alpha: fractional order; eta: weight index; p: scale exponent of the
// operator kernel (a positive real, coinciding with the geometry exponent
// when applied to the Bessel family).
struct EKParams {
    double alpha = 0.5;
    double eta = 0.0;
    double p = 2.0;

    void validate_integral() const {
        if (!(alpha > 0.0)) throw std::invalid_argument("EKParams: alpha must be > 0");
        if (!(p > 0.0)) throw std::invalid_argument("EKParams: p must be > 0");
    }
    void validate_derivative() const {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("EKParams: derivative implemented for 0 < alpha < 1");
        if (!(p > 0.0)) throw std::invalid_argument("EKParams: p must be > 0");
    }
};

// (I f)(r) = (p / Gamma(alpha)) int_0^1 tau^{p(eta+1)-1} f(tau r) (1-tau^p)^{alpha-1} dtau.
// The substitution u = tau^p puts the weight in beta form u^eta (1-u)^{alpha-1},
// which tanh-sinh integrates at full accuracy through the endpoint distances.
template <typename F>
double ek_integral(F&& f, const EKParams& prm, double r, const QuadratureSpec& quad) {
    prm.validate_integral();
    if (!(r > 0.0)) throw std::domain_error("ek_integral: r must be > 0");
    auto f2 = [&](double /*u*/, double dl, double dr) {
        double t = r * std::pow(dl, 1.0 / prm.p);
        // tau r can underflow to zero at deep tanh-sinh nodes (or for tiny r
        // in nested applications); clamp to the smallest normal so f keeps
        // its one-sided limit instead of being sampled at 0
        if (t <= 0.0) t = std::numeric_limits<double>::min();
        double w = (prm.eta == 0.0 ? 1.0 : std::pow(dl, prm.eta)) *
                   (prm.alpha == 1.0 ? 1.0 : std::pow(dr, prm.alpha - 1.0));
        return w * f(t);
    };
    auto res = integrate_endpoint_aware(f2, 0.0, 1.0, quad);
    const double inv_gamma = std::exp(-log_gamma(prm.alpha));
    if (!res.converged)
        throw non_convergence_error("ek_integral: quadrature stalled", res.value * inv_gamma);
    return res.value * inv_gamma;
}

inline DiffSpec ek_diff_spec(double r) {
    return DiffSpec{1e-4 * std::max(1.0, r), 1};
}

// (D f)(r) = r^{-p eta} (1/(p r^{p-1}) d/dr) [ r^{p(1+eta)} (I^{1-alpha}_{p, eta+alpha} f)(r) ],
// the n = 1 case of the fractional derivative; the outer d/dr is a Richardson
// central difference, the inner integral is tightened so differencing noise
// dominates the composite error.
template <typename F>
double ek_derivative(F&& f, const EKParams& prm, double r, const QuadratureSpec& quad,
                     const DiffSpec& diff) {
    prm.validate_derivative();
    if (!(r > 0.0)) throw std::domain_error("ek_derivative: r must be > 0");
    QuadratureSpec inner = quad;
    inner.abs_tol = std::min(quad.abs_tol, 1e-11);
    inner.rel_tol = std::min(quad.rel_tol, 1e-11);
    EKParams inner_prm{1.0 - prm.alpha, prm.eta + prm.alpha, prm.p};
    auto g = [&](double rr) {
        return std::pow(rr, prm.p * (1.0 + prm.eta)) * ek_integral(f, inner_prm, rr, inner);
    };
    double dg = central_diff(g, r, diff);
    return std::pow(r, -prm.p * prm.eta) * dg / (prm.p * std::pow(r, prm.p - 1.0));
}

namespace detail {

// Kernel exponent of the order-raising recurrences after u = tau^p:
// tau^{(p-1)omega+1} dtau = (1/p) u^{(1-1/p)omega + 2/p - 1} du.
inline double raising_exponent(PExponent p, double omega) {
    return (1.0 - double(p.q) / 2.0) * omega + double(p.q) - 1.0;
}

template <typename G>
double raising_integral(PExponent p, double omega, double gamma, double scale, G&& eval_at,
                        const QuadratureSpec& quad) {
    const double e_left = raising_exponent(p, omega);
    auto f2 = [&](double /*u*/, double dl, double dr) {
        double w = (e_left == 0.0 ? 1.0 : std::pow(dl, e_left)) *
                   (gamma == 1.0 ? 1.0 : std::pow(dr, gamma - 1.0));
        if (!std::isfinite(w)) return 0.0; // deep-endpoint underflow guard
        return w * eval_at(pow_q_half(dl, p.q)); // u^{1/p}
    };
    auto res = integrate_endpoint_aware(f2, 0.0, 1.0, quad);
    if (!res.converged)
        throw non_convergence_error("order-raising recurrence: quadrature stalled", res.value);
    const double pp = p.p();
    const double pref =
        std::pow(scale, gamma) / (std::pow(pp, gamma - 1.0) * std::exp(log_gamma(gamma))) / pp;
    return pref * res.value;
}

} // namespace detail

// Right-hand side of the order-raising recurrence for J:
// J_{omega+gamma}^[p](x) = |x|_p^gamma / (p^{gamma-1} Gamma(gamma))
//   int_0^1 J_omega^[p](tau x) tau^{(p-1)omega+1} (1-tau^p)^{gamma-1} dtau.
inline double integral_recurrence_J(PExponent p, double omega, double gamma, double x1, double x2,
                                    const QuadratureSpec& quad,
                                    const EvalPath& path = {}, const SeriesControl& ctrl = {}) {
    if (omega < 0.0 || !(gamma > 0.0))
        throw std::invalid_argument("integral_recurrence_J: need omega >= 0, gamma > 0");
    const double rp = p_norm(x1, x2, p);
    if (rp == 0.0) throw std::domain_error("integral_recurrence_J: x must be nonzero");
    GenBesselParams inner{p, omega};
    auto eval_at = [&](double tau) {
        double y1 = tau * x1, y2 = tau * x2;
        if (tau * rp <= path.series_arg_limit) return gen_bessel_series(inner, y1, y2, ctrl);
        return gen_bessel_integral(inner, y1, y2, quad);
    };
    return detail::raising_integral(p, omega, gamma, rp, eval_at, quad);
}

// Same recurrence for the fixed-angle restriction scriptJ.
inline double integral_recurrence_scriptJ(PExponent p, double omega, double gamma, double phi,
                                          double r, const QuadratureSpec& quad,
                                          const EvalPath& path = {},
                                          const SeriesControl& ctrl = {}) {
    if (!(r > 0.0)) throw std::domain_error("integral_recurrence_scriptJ: r must be > 0");
    if (omega < 0.0 || !(gamma > 0.0))
        throw std::invalid_argument("integral_recurrence_scriptJ: need omega >= 0, gamma > 0");
    GenBesselParams inner{p, omega};
    auto eval_at = [&](double tau) { return script_j(inner, phi, tau * r, path, ctrl, quad); };
    return detail::raising_integral(p, omega, gamma, r, eval_at, quad);
}

// Multivariable Erdelyi-Kober operator
//   P_kappa(eta, alpha) f(x) = (1/Gamma(alpha)) int_0^1 t^eta f(t^kappa x) (1-t)^{alpha-1} dt.
template <typename F2>
double multivar_ek(F2&& f, double kappa, double eta, double alpha, double x1, double x2,
                   const QuadratureSpec& quad) {
    if (!(alpha > 0.0)) throw std::invalid_argument("multivar_ek: alpha must be > 0");
    if (kappa < 0.0) throw std::invalid_argument("multivar_ek: kappa must be >= 0");
    if (x1 == 0.0 && x2 == 0.0) throw std::domain_error("multivar_ek: x must be nonzero");
    auto f2 = [&](double /*t*/, double dl, double dr) {
        double w = (eta == 0.0 ? 1.0 : std::pow(dl, eta)) *
                   (alpha == 1.0 ? 1.0 : std::pow(dr, alpha - 1.0));
        double scale = (kappa == 0.0 ? 1.0 : std::pow(dl, kappa));
        return w * f(scale * x1, scale * x2);
    };
    auto res = integrate_endpoint_aware(f2, 0.0, 1.0, quad);
    const double inv_gamma = std::exp(-log_gamma(alpha));
    if (!res.converged)
        throw non_convergence_error("multivar_ek: quadrature stalled", res.value * inv_gamma);
    return res.value * inv_gamma;
}

// |d/dr[r^{1+(p-1)omega} scriptJ_{omega+1,phi}(r)] - r^{1+(p-1)omega} scriptJ_{omega,phi}(r)|,
// the residual of the order-lowering differential formula.
inline double diff_formula_residual(PExponent p, double omega, double phi, double r,
                                    const DiffSpec& diff, const EvalPath& path = {},
                                    const SeriesControl& ctrl = {},
                                    const QuadratureSpec& quad = {}) {
    if (!(r > 0.0)) throw std::domain_error("diff_formula_residual: r must be > 0");
    const double e = 1.0 + (p.p() - 1.0) * omega;
    GenBesselParams up{p, omega + 1.0};
    GenBesselParams base{p, omega};
    auto F = [&](double rr) { return std::pow(rr, e) * script_j(up, phi, rr, path, ctrl, quad); };
    double lhs = central_diff(F, r, diff);
    double rhs = std::pow(r, e) * script_j(base, phi, r, path, ctrl, quad);
    return std::abs(lhs - rhs);
}

} // namespace pcircle
