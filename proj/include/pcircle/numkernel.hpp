#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcircle/dd.hpp"

// Scalar kernel: gamma/beta helpers, the classical Bessel function J_omega,
// adaptive quadrature (composite Gauss-Legendre and tanh-sinh), Richardson
// central differences and compensated summation.

namespace pcircle {

// Thrown when an iterative evaluation fails to reach its tolerance; carries
// the best estimate obtained so far.
class non_convergence_error : public std::runtime_error {
public:
    non_convergence_error(const std::string& what, double best)
        : std::runtime_error(what), best_estimate(best) {}
    double best_estimate;
};

// Thrown when an evaluation path refuses an argument outside its validated
// range (the caller should switch paths).
class path_refused_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class QuadMethod { composite_gauss_legendre, double_exponential };
enum class EndpointSingularity { none, left, right, both };

struct QuadratureSpec {
    QuadMethod method = QuadMethod::composite_gauss_legendre;
    double rel_tol = 1e-12;
    double abs_tol = 1e-13;
    int max_nodes = 2'000'000;
    EndpointSingularity endpoint_singularity = EndpointSingularity::none;

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw std::invalid_argument("QuadratureSpec: tolerances must be positive");
        if (max_nodes < 8)
            throw std::invalid_argument("QuadratureSpec: max_nodes must be >= 8");
    }

    // Default policy: tanh-sinh whenever an endpoint singularity is declared,
    // composite Gauss-Legendre otherwise.
    static QuadratureSpec for_singularity(EndpointSingularity s) {
        QuadratureSpec spec;
        spec.endpoint_singularity = s;
        spec.method = (s == EndpointSingularity::none)
                          ? QuadMethod::composite_gauss_legendre
                          : QuadMethod::double_exponential;
        return spec;
    }
};

struct SeriesControl {
    int max_terms = 400;
    double tail_tol = 1e-14;
    bool compensated = true;

    void validate() const {
        if (max_terms < 1) throw std::invalid_argument("SeriesControl: max_terms must be >= 1");
        if (!(tail_tol > 0.0)) throw std::invalid_argument("SeriesControl: tail_tol must be > 0");
    }
};

struct DiffSpec {
    double step = 1e-4;
    int richardson_levels = 1;

    void validate() const {
        if (!(step > 0.0)) throw std::invalid_argument("DiffSpec: step must be > 0");
        if (richardson_levels < 0)
            throw std::invalid_argument("DiffSpec: richardson_levels must be >= 0");
    }
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long nodes_used = 0;
    bool converged = false;
};

// ---------------------------------------------------------------------------
// gamma / beta
// ---------------------------------------------------------------------------

inline double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::domain_error("log_gamma: argument must be positive and finite");
    return std::lgamma(x);
}

inline double beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("beta: arguments must be positive");
    return std::exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b));
}

// ---------------------------------------------------------------------------
// compensated summation
// ---------------------------------------------------------------------------

inline double compensated_sum(std::span<const double> terms) {
    dd_sum acc;
    for (double t : terms) acc.add(t);
    return acc.result();
}

inline double compensated_sum(const std::vector<double>& terms) {
    return compensated_sum(std::span<const double>(terms));
}

// ---------------------------------------------------------------------------
// classical Bessel function J_omega(r), omega >= 0 real
// ---------------------------------------------------------------------------

namespace detail {

// Power-series evaluation with double-double terms and accumulation.
// The alternating series loses ~r/ln(10) digits to cancellation; the extra
// word keeps absolute accuracy near 1e-13 up to the crossover radius.
inline double bessel_j_series(double omega, double r) {
    if (r == 0.0) return omega == 0.0 ? 1.0 : 0.0;
    double h = r / 2.0;
    // seed (r/2)^omega / Gamma(1+omega): a uniform scale factor, double is enough
    double seed = std::exp(omega * std::log(h) - std::lgamma(1.0 + omega));
    dd z2 = detail::two_prod(h, h);
    dd term(seed);
    dd_sum sum;
    sum.add(term);
    int kmax = 64 + int(r);
    for (int k = 1; k <= kmax; ++k) {
        dd denom = dd(double(k)) * (dd(double(k)) + omega);
        term = -(term * z2) / denom;
        sum.add(term);
        if (k > int(h) && std::abs(term.hi) < 1e-22 * (std::abs(sum.value().hi) + 1e-30))
            break;
    }
    return sum.result();
}

// Hankel large-argument form: J ~ sqrt(2/(pi r)) [P cos(chi) - Q sin(chi)],
// chi = r - (omega/2 + 1/4) pi. Truncated at the smallest term; below the
// crossover radius the smallest term is already ~1e-13.
inline double bessel_j_asymptotic(double omega, double r) {
    double mu = 4.0 * omega * omega;
    double p = 1.0, q = 0.0;
    double term = 1.0;
    double prev = std::numeric_limits<double>::max();
    for (int k = 1; k < 60; ++k) {
        double f = mu - double(2 * k - 1) * double(2 * k - 1);
        term *= f / (8.0 * r * double(k));
        if (std::abs(term) >= prev) break; // divergent tail reached
        prev = std::abs(term);
        if (k % 2 == 1) {
            q += (k % 4 == 1) ? term : -term;
        } else {
            p += (k % 4 == 2) ? -term : term;
        }
        if (std::abs(term) < 1e-18) break;
    }
    double chi = r - (omega / 2.0 + 0.25) * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * r)) * (p * std::cos(chi) - q * std::sin(chi));
}

inline constexpr double kBesselCrossover = 18.0;

} // namespace detail

inline double classical_bessel_j(double omega, double r) {
    if (r < 0.0 || !std::isfinite(r))
        throw std::domain_error("classical_bessel_j: argument must be >= 0 and finite");
    if (omega < 0.0)
        throw std::domain_error("classical_bessel_j: order must be >= 0");
    return r <= detail::kBesselCrossover ? detail::bessel_j_series(omega, r)
                                         : detail::bessel_j_asymptotic(omega, r);
}

// ---------------------------------------------------------------------------
// quadrature
// ---------------------------------------------------------------------------

namespace detail {

// 16-point Gauss-Legendre rule on [-1, 1].
struct GL16Node { double x, w; };
inline constexpr GL16Node kGL16[16] = {
    {-0.9894009349916499325961542, 0.02715245941175409485178057},
    {-0.9445750230732325760779884, 0.06225352393864789286284384},
    {-0.8656312023878317438804679, 0.09515851168249278480992511},
    {-0.7554044083550030338951012, 0.1246289712555338720524763},
    {-0.6178762444026437484466718, 0.1495959888165767320815017},
    {-0.4580167776572273863424194, 0.1691565193950025381893121},
    {-0.2816035507792589132304605, 0.1826034150449235888667637},
    {-0.09501250983763744018531934, 0.1894506104550684962853967},
    {0.09501250983763744018531934, 0.1894506104550684962853967},
    {0.2816035507792589132304605, 0.1826034150449235888667637},
    {0.4580167776572273863424194, 0.1691565193950025381893121},
    {0.6178762444026437484466718, 0.1495959888165767320815017},
    {0.7554044083550030338951012, 0.1246289712555338720524763},
    {0.8656312023878317438804679, 0.09515851168249278480992511},
    {0.9445750230732325760779884, 0.06225352393864789286284384},
    {0.9894009349916499325961542, 0.02715245941175409485178057},
};

// Fixed composite GL16 pass; deterministic node order.
template <typename F>
double composite_gl_fixed(F&& f, double a, double b, long panels) {
    const double width = (b - a) / double(panels);
    dd_sum acc;
    for (long i = 0; i < panels; ++i) {
        const double lo = a + width * double(i);
        const double mid = lo + 0.5 * width;
        const double half = 0.5 * width;
        for (const auto& n : kGL16)
            acc.add(half * n.w * f(mid + half * n.x));
    }
    return acc.result();
}

// f2 receives (x, distance to left endpoint, distance to right endpoint) so
// endpoint-singular weights keep full relative accuracy under tanh-sinh.
template <typename F2>
QuadratureResult tanh_sinh(F2&& f2, double a, double b, const QuadratureSpec& spec) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const double pi_half = 0.5 * std::numbers::pi;
    // Abscissa t, transform u = (pi/2) sinh t, x = mid + half tanh u.
    // Distance to the nearer endpoint: half * 2 e^{-2|u|} / (1 + e^{-2|u|}).
    const double t_max = 6.1; // endpoint distance ~1e-280 at the last node
    struct Node { double dist; double weight; double t; };
    auto make_node = [&](double t) -> Node {
        double u = pi_half * std::sinh(t);
        double au = std::abs(u);
        double e = std::exp(-2.0 * au);
        double dist = half * 2.0 * e / (1.0 + e);
        double sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
        double w = half * pi_half * std::cosh(t) * sech2;
        return {dist, w, t};
    };
    auto eval_at = [&](const Node& n, bool positive) {
        // positive t: x near b; negative: x near a
        if (positive) {
            double x = b - n.dist;
            return f2(x, (x - a), n.dist);
        }
        double x = a + n.dist;
        return f2(x, n.dist, (b - x));
    };

    double h = 1.0;
    long nodes = 0;
    // level 0
    Node n0 = make_node(0.0);
    dd_sum acc;
    acc.add(n0.weight * f2(mid, mid - a, b - mid));
    ++nodes;
    for (double t = h; t <= t_max; t += h) {
        Node n = make_node(t);
        if (n.weight < 1e-290) break;
        acc.add(n.weight * eval_at(n, true));
        acc.add(n.weight * eval_at(n, false));
        nodes += 2;
    }
    double prev = acc.result() * h;
    QuadratureResult res{prev, std::abs(prev), nodes, false};
    for (int level = 1; level <= 10; ++level) {
        h *= 0.5;
        for (double t = h; t <= t_max; t += 2.0 * h) {
            Node n = make_node(t);
            if (n.weight < 1e-290) break;
            acc.add(n.weight * eval_at(n, true));
            acc.add(n.weight * eval_at(n, false));
            nodes += 2;
        }
        double cur = acc.result() * h;
        double err = std::abs(cur - prev);
        res = {cur, err, nodes, false};
        if (err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(cur)) && level >= 2) {
            res.converged = true;
            return res;
        }
        if (nodes > spec.max_nodes) return res;
        prev = cur;
    }
    // level cap reached; report whatever tolerance we met
    res.converged = res.error_estimate <=
                    std::max(spec.abs_tol, spec.rel_tol * std::abs(res.value)) * 4.0;
    return res;
}

template <typename F>
QuadratureResult composite_gl_adaptive(F&& f, double a, double b, const QuadratureSpec& spec,
                                       long initial_panels = 1) {
    long panels = std::max<long>(1, initial_panels);
    double prev = composite_gl_fixed(f, a, b, panels);
    long nodes = 16 * panels;
    QuadratureResult res{prev, std::abs(prev), nodes, false};
    while (true) {
        panels *= 2;
        if (16 * panels > spec.max_nodes) return res;
        double cur = composite_gl_fixed(f, a, b, panels);
        nodes += 16 * panels;
        double err = std::abs(cur - prev);
        res = {cur, err, nodes, false};
        if (err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(cur))) {
            res.converged = true;
            return res;
        }
        prev = cur;
    }
}

} // namespace detail

// Integrate f over (a, b). For double_exponential the integrand is sampled
// strictly inside the interval, so endpoint singularities declared in the
// spec are admissible.
template <typename F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureSpec& spec) {
    spec.validate();
    if (!(a < b)) throw std::invalid_argument("integrate: require a < b");
    if (spec.method == QuadMethod::double_exponential) {
        auto f2 = [&f](double x, double, double) { return f(x); };
        return detail::tanh_sinh(f2, a, b, spec);
    }
    return detail::composite_gl_adaptive(f, a, b, spec);
}

// Variant for endpoint-singular weights: f2(x, dist_left, dist_right) can
// build terms like pow(dist_left, eta) at full relative accuracy.
template <typename F2>
QuadratureResult integrate_endpoint_aware(F2&& f2, double a, double b,
                                          const QuadratureSpec& spec) {
    spec.validate();
    if (!(a < b)) throw std::invalid_argument("integrate: require a < b");
    return detail::tanh_sinh(f2, a, b, spec);
}

// ---------------------------------------------------------------------------
// numerical differentiation
// ---------------------------------------------------------------------------

template <typename F>
double central_diff(F&& f, double r, const DiffSpec& spec) {
    spec.validate();
    int levels = std::min(spec.richardson_levels, 8);
    std::vector<double> row(levels + 1);
    double h = spec.step;
    for (int i = 0; i <= levels; ++i) {
        row[i] = (f(r + h) - f(r - h)) / (2.0 * h);
        h *= 0.5;
    }
    // Richardson extrapolation on the h^2 error expansion.
    double pow4 = 4.0;
    for (int lev = 1; lev <= levels; ++lev) {
        for (int i = levels; i >= lev; --i)
            row[i] = (pow4 * row[i] - row[i - 1]) / (pow4 - 1.0);
        pow4 *= 4.0;
    }
    return row[levels];
}

} // namespace pcircle
