#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "pcircle/dd.hpp"
#include "pcircle/genbessel.hpp"
#include "pcircle/numkernel.hpp"
#include "pcircle/parallel.hpp"
#include "pcircle/pgeom.hpp"

// Partial sums of the generalized Hardy identity
//   P_p(r) = (p Gamma(1/p)^2 / 2pi) r sum_{shells s} s^{-1/p}
//            sum_{phi in A_s} scriptJ_{1,phi}(2 pi s^{1/p} r),
// the classical p = 2 reduction through R(k), convergence traces against the
// direct error term, and the empirical decay-slope estimate.

namespace pcircle {

struct HardySumConfig {
    PExponent p;
    double r = 1.0;
    double s_max = 1.0;
    EvalPath path{};
    SeriesControl ctrl{};
    QuadratureSpec quad = make_default_quad();

    static QuadratureSpec make_default_quad() {
        QuadratureSpec q;
        q.abs_tol = 1e-13;
        q.rel_tol = 1e-13;
        return q;
    }

    void validate() const {
        if (!(r > 0.0)) throw std::invalid_argument("HardySumConfig: r must be > 0");
        if (!(s_max >= 0.0)) throw std::invalid_argument("HardySumConfig: s_max must be >= 0");
        path.validate();
        ctrl.validate();
        quad.validate();
    }
};

struct TraceCheckpoint {
    double s_max = 0.0;
    double partial_sum = 0.0;
    double direct_error_term = 0.0;
    double residual = 0.0;
};

struct PartialSumTrace {
    std::vector<TraceCheckpoint> checkpoints;
    double tail_average = 0.0;
};

namespace detail {

struct ShellContribution {
    double s = 0.0;
    double value = 0.0; // s^{-1/p} sum_phi scriptJ_1(2 pi s^{1/p} r)
};

// Per-shell contributions, ascending in s. Each distinct coordinate-magnitude
// pair is evaluated once (the series has only even powers and symmetric
// coefficients, so the value depends on {|n1|, |n2|} only); evaluation runs
// in parallel, accumulation stays in canonical shell order.
inline std::vector<ShellContribution> hardy_shell_contributions(const HardySumConfig& cfg) {
    cfg.validate();
    if (cfg.s_max < 1.0) return {};
    const auto shells = enumerate_shells(cfg.p, cfg.s_max);
    const int q = cfg.p.q;

    struct Task {
        std::size_t shell_index;
        double a, b; // |n1| >= |n2|
        int multiplicity;
        double value = 0.0;
    };
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < shells.size(); ++i) {
        std::map<std::pair<std::int64_t, std::int64_t>, int> groups;
        for (const auto& pt : shells[i].points) {
            std::int64_t a = std::llabs(pt.n1), b = std::llabs(pt.n2);
            if (a < b) std::swap(a, b);
            ++groups[{a, b}];
        }
        for (const auto& [key, mult] : groups)
            tasks.push_back({i, double(key.first), double(key.second), mult});
    }

    const double two_pi_r = 2.0 * std::numbers::pi * cfg.r;
    parallel_for(tasks.size(), [&](std::size_t t) {
        Task& task = tasks[t];
        const double big_r = pow_q_half(shells[task.shell_index].s, q); // s^{1/p}
        const double rho = two_pi_r * big_r;
        if (rho <= cfg.path.series_arg_limit) {
            GenBesselParams prm{cfg.p, 1.0};
            task.value =
                gen_bessel_series(prm, two_pi_r * task.a, two_pi_r * task.b, cfg.ctrl);
        } else {
            auto res = scriptj1_swap_core(q, task.a / big_r, task.b / big_r, rho, cfg.quad);
            if (!res.converged) {
                double phi = shell_angle({std::int64_t(task.a), std::int64_t(task.b)},
                                         shells[task.shell_index].s, cfg.p);
                throw non_convergence_error(
                    "hardy: shell term quadrature stalled at s = " +
                        std::to_string(shells[task.shell_index].s) + ", phi = " +
                        std::to_string(phi),
                    res.value);
            }
            task.value = res.value;
        }
    });

    std::vector<ShellContribution> contrib(shells.size());
    for (std::size_t i = 0; i < shells.size(); ++i)
        contrib[i] = {shells[i].s, 0.0};
    std::vector<dd_sum> acc(shells.size());
    for (const auto& task : tasks)
        acc[task.shell_index].add(dd(task.value) * double(task.multiplicity));
    for (std::size_t i = 0; i < shells.size(); ++i) {
        const double big_r = pow_q_half(shells[i].s, q);
        contrib[i].value = (acc[i].value() / big_r).hi;
    }
    return contrib;
}

inline double hardy_prefactor(PExponent p) {
    const double g = gamma_q_half(p.q);
    return p.p() * g * g / (2.0 * std::numbers::pi);
}

} // namespace detail

// Truncated right-hand side of the identity, shells up to s_max in ascending
// order, within-shell terms in lexicographic point order.
inline double hardy_partial_sum(const HardySumConfig& cfg) {
    auto contrib = detail::hardy_shell_contributions(cfg);
    dd_sum sum;
    for (const auto& c : contrib) sum.add(c.value);
    return detail::hardy_prefactor(cfg.p) * cfg.r * sum.result();
}

// Classical p = 2 form r sum_k R(k) k^{-1/2} J_1(2 pi sqrt(k) r).
inline double classical_hardy_sum(double r, std::int64_t k_max) {
    if (!(r > 0.0)) throw std::domain_error("classical_hardy_sum: r must be > 0");
    if (k_max < 0) throw std::invalid_argument("classical_hardy_sum: k_max must be >= 0");
    if (k_max == 0) return 0.0;
    // sieve R(k) by direct enumeration of the disk
    std::vector<std::int32_t> r2(std::size_t(k_max) + 1, 0);
    std::int64_t amax = std::int64_t(std::sqrt(double(k_max))) + 1;
    while (amax * amax > k_max) --amax;
    for (std::int64_t a = -amax; a <= amax; ++a) {
        std::int64_t rem = k_max - a * a;
        std::int64_t bmax = std::int64_t(std::sqrt(double(rem)));
        while (bmax * bmax > rem) --bmax;
        while ((bmax + 1) * (bmax + 1) <= rem) ++bmax;
        for (std::int64_t b = -bmax; b <= bmax; ++b) ++r2[std::size_t(a * a + b * b)];
    }
    r2[0] = 0;
    dd_sum sum;
    const double two_pi_r = 2.0 * std::numbers::pi * r;
    for (std::int64_t k = 1; k <= k_max; ++k) {
        if (r2[std::size_t(k)] == 0) continue;
        double sq = std::sqrt(double(k));
        sum.add(double(r2[std::size_t(k)]) / sq * classical_bessel_j(1.0, two_pi_r * sq));
    }
    return r * sum.result();
}

// Incremental partial sums at each checkpoint of an ascending schedule; terms
// are computed once and reused. tail_average is the mean of the partial sums
// over the final `window` checkpoints.
inline PartialSumTrace convergence_trace(const HardySumConfig& cfg,
                                         const std::vector<double>& schedule, int window) {
    if (schedule.empty()) throw std::invalid_argument("convergence_trace: empty schedule");
    if (window < 1) throw std::invalid_argument("convergence_trace: window must be >= 1");
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (!(schedule[i] > schedule[i - 1]))
            throw std::invalid_argument("convergence_trace: schedule must be ascending");

    HardySumConfig full = cfg;
    full.s_max = schedule.back();
    auto contrib = detail::hardy_shell_contributions(full);
    const double direct = error_term_direct(cfg.p, cfg.r).value;
    const double pref = detail::hardy_prefactor(cfg.p) * cfg.r;

    PartialSumTrace trace;
    trace.checkpoints.reserve(schedule.size());
    dd_sum running;
    std::size_t idx = 0;
    for (double s_cut : schedule) {
        while (idx < contrib.size() &&
               contrib[idx].s <= s_cut * (1.0 + 1e-12)) {
            running.add(contrib[idx].value);
            ++idx;
        }
        double partial = pref * running.result();
        trace.checkpoints.push_back({s_cut, partial, direct, partial - direct});
    }
    const std::size_t n = trace.checkpoints.size();
    const std::size_t w = std::min<std::size_t>(window, n);
    dd_sum tail;
    for (std::size_t i = n - w; i < n; ++i) tail.add(trace.checkpoints[i].partial_sum);
    trace.tail_average = tail.result() / double(w);
    return trace;
}

// ---------------------------------------------------------------------------
// decay-slope study
// ---------------------------------------------------------------------------

class insufficient_data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DecayEstimate {
    double slope = 0.0;
    std::vector<std::pair<double, double>> maxima; // (r, |scriptJ_0|) at local maxima
    std::vector<double> values;                    // |scriptJ_0| on the full grid
};

// Envelope of |scriptJ_{0,phi}| on an ascending grid: integral-path samples,
// strict interior local maxima, least-squares slope in log-log coordinates.
inline DecayEstimate decay_envelope(PExponent p, double phi, const std::vector<double>& r_grid,
                                    const QuadratureSpec& quad) {
    if (r_grid.size() < 8) throw std::invalid_argument("decay_envelope: grid too small");
    for (std::size_t i = 1; i < r_grid.size(); ++i)
        if (!(r_grid[i] > r_grid[i - 1]))
            throw std::invalid_argument("decay_envelope: grid must be ascending");
    GenBesselParams prm{p, 0.0};
    DecayEstimate est;
    est.values.resize(r_grid.size());
    parallel_for(r_grid.size(), [&](std::size_t i) {
        auto [x1, x2] = from_distorted_polar({r_grid[i], phi}, p);
        est.values[i] = std::abs(gen_bessel_integral(prm, x1, x2, quad));
    });
    for (std::size_t i = 1; i + 1 < r_grid.size(); ++i)
        if (est.values[i] > est.values[i - 1] && est.values[i] > est.values[i + 1] &&
            est.values[i] > 0.0)
            est.maxima.emplace_back(r_grid[i], est.values[i]);
    if (est.maxima.size() < 3)
        throw insufficient_data_error("decay_envelope: fewer than 3 envelope maxima");
    // least squares on log-log
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(est.maxima.size());
    for (const auto& [rv, vv] : est.maxima) {
        double lx = std::log(rv), ly = std::log(vv);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    est.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return est;
}

inline double decay_slope_estimate(PExponent p, double phi, const std::vector<double>& r_grid,
                                   const QuadratureSpec& quad) {
    return decay_envelope(p, phi, r_grid, quad).slope;
}

} // namespace pcircle
