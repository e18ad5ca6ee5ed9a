// pcircle: command-line interface over the p-circle lattice toolkit.
//
// Subcommands: count, bessel, shells, hardy, decay, verify.
// Exit codes: 0 success, 1 verification failure, 2 usage error,
//             3 numerical non-convergence, 4 internal invariant violation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pcircle/erdkober.hpp"
#include "pcircle/genbessel.hpp"
#include "pcircle/hardy.hpp"
#include "pcircle/numkernel.hpp"
#include "pcircle/parallel.hpp"
#include "pcircle/pgeom.hpp"
#include "pcircle/verify.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitInvariantViolation = 4;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Output {
    std::string path;   // empty: stdout
    std::string format; // "csv" or "json"

    void write(const std::string& text) const {
        if (path.empty()) {
            std::fwrite(text.data(), 1, text.size(), stdout);
            return;
        }
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + path);
        out.write(text.data(), std::streamsize(text.size()));
    }
};

std::string join_angles(const std::vector<double>& angles) {
    std::string s;
    for (std::size_t i = 0; i < angles.size(); ++i) {
        if (i) s += ';';
        s += num(angles[i]);
    }
    return s;
}

// ---------------------------------------------------------------------------

int cmd_count(int q, double r, const Output& out) {
    pcircle::PExponent p{q};
    auto res = pcircle::error_term_direct(p, r);
    if (out.format == "json") {
        json j{{"q", q},
               {"r", r},
               {"count", res.count},
               {"area", res.area},
               {"error_term", res.value},
               {"boundary_flag", res.boundary_flag},
               {"boundary_gap", res.boundary_gap}};
        out.write(j.dump(2) + "\n");
    } else {
        std::string s = "q,r,count,area,error_term,boundary_flag,boundary_gap\n";
        s += std::to_string(q) + "," + num(r) + "," + std::to_string(res.count) + "," +
             num(res.area) + "," + num(res.value) + "," + (res.boundary_flag ? "1" : "0") + "," +
             num(res.boundary_gap) + "\n";
        out.write(s);
    }
    return kExitOk;
}

int cmd_bessel(int q, double omega, std::vector<double> x, const std::string& mode,
               const Output& out) {
    pcircle::PExponent p{q};
    pcircle::GenBesselParams prm{p, omega};
    pcircle::SeriesControl ctrl;
    pcircle::QuadratureSpec quad;
    quad.abs_tol = 1e-12;
    quad.rel_tol = 1e-12;
    const double rp = pcircle::p_norm(x[0], x[1], p);
    pcircle::EvalPath path;
    bool use_series = mode == "series" || (mode == "auto" && rp <= path.series_arg_limit);

    double value = 0.0;
    double tail_bound = std::numeric_limits<double>::quiet_NaN();
    double quad_error = std::numeric_limits<double>::quiet_NaN();
    long nodes = 0;
    int diagonals = 0;
    if (use_series) {
        auto eval = pcircle::detail::series_engine(prm, x[0], x[1], ctrl);
        value = eval.value;
        tail_bound = eval.tail_bound;
        diagonals = eval.diagonals_used;
    } else {
        auto res = pcircle::detail::gen_bessel_integral_result(prm, x[0], x[1], quad);
        if (!res.converged)
            throw pcircle::non_convergence_error("bessel: quadrature did not converge", res.value);
        value = res.value;
        quad_error = res.error_estimate;
        nodes = res.nodes_used;
    }
    const char* used = use_series ? "series" : "integral";
    if (out.format == "json") {
        json j{{"q", q},   {"omega", omega},         {"x", {x[0], x[1]}},
               {"path", used}, {"value", value}};
        if (use_series) {
            j["tail_bound"] = tail_bound;
            j["diagonals"] = diagonals;
        } else {
            j["quad_error"] = quad_error;
            j["nodes"] = nodes;
        }
        out.write(j.dump(2) + "\n");
    } else {
        std::string s = "q,omega,x1,x2,path,value,tail_bound,quad_error,nodes\n";
        s += std::to_string(q) + "," + num(omega) + "," + num(x[0]) + "," + num(x[1]) + "," +
             used + "," + num(value) + ",";
        s += (use_series ? num(tail_bound) : std::string()) + ",";
        s += (use_series ? std::string() : num(quad_error)) + ",";
        s += (use_series ? std::to_string(diagonals) : std::to_string(nodes)) + "\n";
        out.write(s);
    }
    return kExitOk;
}

int cmd_shells(int q, double s_max, const Output& out) {
    pcircle::PExponent p{q};
    auto shells = pcircle::enumerate_shells(p, s_max);
    // cardinality-bound violations are internal errors, not data
    for (const auto& sh : shells) {
        double bound = 4.0 * std::floor(pcircle::detail::pow_q_half(sh.s, q) + 1e-12);
        if (double(sh.points.size()) > bound) {
            std::fprintf(stderr, "internal invariant violation: shell s=%s multiplicity %zu > %g\n",
                         num(sh.s).c_str(), sh.points.size(), bound);
            return kExitInvariantViolation;
        }
    }
    if (out.format == "json") {
        json arr = json::array();
        for (const auto& sh : shells) {
            json points = json::array();
            for (const auto& pt : sh.points) points.push_back({pt.n1, pt.n2});
            arr.push_back({{"s", sh.s},
                           {"multiplicity", sh.points.size()},
                           {"bound", 4 * std::int64_t(std::floor(
                                             pcircle::detail::pow_q_half(sh.s, q) + 1e-12))},
                           {"points", points},
                           {"angles", sh.angles}});
        }
        json j{{"q", q}, {"s_max", s_max}, {"shells", arr}};
        out.write(j.dump(2) + "\n");
    } else {
        std::string s = "s,multiplicity,bound,angles\n";
        for (const auto& sh : shells) {
            long long bound =
                4 * (long long)(std::floor(pcircle::detail::pow_q_half(sh.s, q) + 1e-12));
            s += num(sh.s) + "," + std::to_string(sh.points.size()) + "," +
                 std::to_string(bound) + "," + join_angles(sh.angles) + "\n";
        }
        out.write(s);
    }
    return kExitOk;
}

int cmd_hardy(int q, double r, double s_max, std::vector<double> schedule, int window,
              const Output& out) {
    pcircle::PExponent p{q};
    auto direct = pcircle::error_term_direct(p, r);
    if (direct.boundary_flag)
        std::fprintf(stderr,
                     "warning: r is within 1e-9 of a lattice radius; the identity value at jumps "
                     "is not defined here\n");
    if (schedule.empty()) {
        // default: 32 checkpoints over the upper half of the range
        if (s_max < 1.0) {
            schedule.push_back(s_max);
        } else {
            const int n = 32;
            for (int i = 1; i <= n; ++i)
                schedule.push_back(s_max / 2.0 + (s_max - s_max / 2.0) * double(i) / n);
        }
    }
    pcircle::HardySumConfig cfg{p, r, schedule.back()};
    auto trace = pcircle::convergence_trace(cfg, schedule, window);
    if (out.format == "json") {
        json cps = json::array();
        std::size_t n = trace.checkpoints.size();
        for (std::size_t i = 0; i < n; ++i) {
            const auto& c = trace.checkpoints[i];
            // trailing-window average ending at this checkpoint
            std::size_t w = std::min<std::size_t>(window, i + 1);
            pcircle::dd_sum acc;
            for (std::size_t k = i + 1 - w; k <= i; ++k)
                acc.add(trace.checkpoints[k].partial_sum);
            cps.push_back({{"s_max", c.s_max},
                           {"partial_sum", c.partial_sum},
                           {"residual", c.residual},
                           {"tail_average", acc.result() / double(w)}});
        }
        json j{{"q", q},
               {"r", r},
               {"window", window},
               {"direct_error_term", trace.checkpoints.empty() ? direct.value
                                                               : trace.checkpoints[0].direct_error_term},
               {"tail_average", trace.tail_average},
               {"checkpoints", cps}};
        out.write(j.dump(2) + "\n");
    } else {
        std::string s = "s_max,partial_sum,direct_error_term,residual,tail_average\n";
        std::size_t n = trace.checkpoints.size();
        for (std::size_t i = 0; i < n; ++i) {
            const auto& c = trace.checkpoints[i];
            std::size_t w = std::min<std::size_t>(window, i + 1);
            pcircle::dd_sum acc;
            for (std::size_t k = i + 1 - w; k <= i; ++k)
                acc.add(trace.checkpoints[k].partial_sum);
            s += num(c.s_max) + "," + num(c.partial_sum) + "," + num(c.direct_error_term) + "," +
                 num(c.residual) + "," + num(acc.result() / double(w)) + "\n";
        }
        out.write(s);
    }
    return kExitOk;
}

int cmd_decay(int q, double phi, double r_min, double r_max, int points, const Output& out) {
    pcircle::PExponent p{q};
    if (!(r_min > 0.0) || !(r_max > r_min)) throw std::invalid_argument("decay: bad radius range");
    if (points < 16) throw std::invalid_argument("decay: need at least 16 grid points");
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i)
        grid[i] = r_min + (r_max - r_min) * double(i) / double(points - 1);
    pcircle::QuadratureSpec quad;
    quad.abs_tol = 1e-11;
    quad.rel_tol = 1e-11;
    auto est = pcircle::decay_envelope(p, phi, grid, quad);
    if (out.format == "json") {
        json maxima = json::array();
        for (auto& [rv, vv] : est.maxima) maxima.push_back({rv, vv});
        json samples = json::array();
        for (int i = 0; i < points; ++i) samples.push_back({grid[i], est.values[i]});
        json j{{"q", q},       {"phi", phi},       {"r_min", r_min}, {"r_max", r_max},
               {"points", points}, {"slope", est.slope}, {"maxima", maxima}, {"samples", samples}};
        out.write(j.dump(2) + "\n");
    } else {
        std::string s = "kind,r,value\n";
        for (int i = 0; i < points; ++i)
            s += "sample," + num(grid[i]) + "," + num(est.values[i]) + "\n";
        for (auto& [rv, vv] : est.maxima) s += "max," + num(rv) + "," + num(vv) + "\n";
        s += "slope,," + num(est.slope) + "\n";
        out.write(s);
    }
    return kExitOk;
}

int cmd_verify(const std::string& filter, bool fast, const Output& out) {
    auto suites = pcircle::verify::run_suites(filter, fast);
    if (suites.empty()) {
        std::fprintf(stderr, "verify: unknown filter '%s'\n", filter.c_str());
        return kExitUsage;
    }
    int passed = 0, failed = 0;
    for (const auto& s : suites)
        for (const auto& c : s.checks) (c.pass ? passed : failed)++;
    if (out.format == "json") {
        json arr = json::array();
        for (const auto& s : suites) {
            json checks = json::array();
            for (const auto& c : s.checks)
                checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
            arr.push_back({{"module", s.module}, {"checks", checks}});
        }
        json j{{"filter", filter}, {"fast", fast},     {"suites", arr},
               {"passed", passed}, {"failed", failed}};
        out.write(j.dump(2) + "\n");
    } else {
        std::string text;
        for (const auto& s : suites)
            for (const auto& c : s.checks)
                text += std::string(c.pass ? "[PASS] " : "[FAIL] ") + s.module + "/" + c.name +
                        ": " + c.detail + "\n";
        text += "checks: " + std::to_string(passed + failed) +
                ", passed: " + std::to_string(passed) + ", failed: " + std::to_string(failed) +
                "\n";
        out.write(text);
    }
    return failed == 0 ? kExitOk : kExitVerifyFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "pcircle: lattice points, generalized Bessel functions and Hardy-type sums\n"
        "for p-circles |x1|^p + |x2|^p = r^p with 2/p a positive integer.\n"
        "The exponent is always passed as the integer q = 2/p."};
    app.require_subcommand(1);
    app.fallthrough(); // allow --format/--out/--threads after the subcommand
    app.set_config("--config", "", "read options from a key=value config file "
                                   "(sections [count], [bessel], ... per subcommand; "
                                   "command-line flags override the file)");

    int threads = pcircle::max_threads();
    app.add_option("--threads", threads,
                   "worker threads for shell sums and grids; output is identical for any value")
        ->envname("PCIRCLE_THREADS")
        ->check(CLI::PositiveNumber);
    Output out;
    out.format = "csv";
    app.add_option("--format", out.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", out.path, "output file (default: stdout)");

    // count
    auto* count = app.add_subcommand("count", "lattice count N_p(r), area term and P_p(r)");
    int count_q = 1;
    double count_r = 1.0;
    count->add_option("--q", count_q, "q = 2/p (1: circle, 2: diamond, 3: astroid-type, ...)")
        ->required()
        ->check(CLI::PositiveNumber);
    count->add_option("--r", count_r, "radius")->required();

    // bessel
    auto* bessel = app.add_subcommand("bessel", "generalized Bessel function J_omega^[p](x)");
    int bessel_q = 1;
    double bessel_omega = 0.0;
    std::vector<double> bessel_x;
    std::string bessel_path = "auto";
    bessel->add_option("--q", bessel_q, "q = 2/p")->required()->check(CLI::PositiveNumber);
    bessel->add_option("--omega", bessel_omega, "order (>= 0)")->required();
    bessel->add_option("--x", bessel_x, "argument (two reals)")->required()->expected(2);
    bessel->add_option("--path", bessel_path, "evaluation path")
        ->check(CLI::IsMember({"auto", "series", "integral"}));

    // shells
    auto* shells = app.add_subcommand("shells", "shells s = |n|_p^p with distorted angles");
    int shells_q = 1;
    double shells_smax = 1.0;
    shells->add_option("--q", shells_q, "q = 2/p")->required()->check(CLI::PositiveNumber);
    shells->add_option("--s-max", shells_smax, "largest shell value")->required();

    // hardy
    auto* hardy = app.add_subcommand("hardy", "Hardy-identity partial sums vs direct P_p(r)");
    int hardy_q = 1;
    double hardy_r = 1.0, hardy_smax = 1.0;
    std::vector<double> hardy_schedule;
    int hardy_window = 8;
    hardy->add_option("--q", hardy_q, "q = 2/p")->required()->check(CLI::PositiveNumber);
    hardy->add_option("--r", hardy_r, "radius")->required();
    hardy->add_option("--s-max", hardy_smax, "truncation level (default checkpoint schedule)");
    hardy->add_option("--schedule", hardy_schedule, "explicit ascending checkpoint list")
        ->delimiter(',');
    hardy->add_option("--window", hardy_window, "tail-average window (checkpoints)")
        ->check(CLI::PositiveNumber);

    // decay
    auto* decay = app.add_subcommand("decay", "envelope decay slope of |scriptJ_0| at fixed angle");
    int decay_q = 1, decay_points = 1500;
    double decay_phi = std::numbers::pi / 4.0, decay_rmin = 50.0, decay_rmax = 400.0;
    decay->add_option("--q", decay_q, "q = 2/p")->required()->check(CLI::PositiveNumber);
    decay->add_option("--phi", decay_phi, "distorted angle");
    decay->add_option("--r-min", decay_rmin, "grid start")->required();
    decay->add_option("--r-max", decay_rmax, "grid end")->required();
    decay->add_option("--points", decay_points, "grid size");

    // verify
    auto* verify = app.add_subcommand("verify", "run the invariant suites of every module");
    std::string verify_filter;
    bool verify_fast = false;
    verify->add_option("--filter", verify_filter,
                       "restrict to one module (numkernel, pgeom, genbessel, erdkober, hardy)");
    verify->add_flag("--fast", verify_fast, "reduced grids (< 60 s)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    pcircle::set_max_threads(threads);
    try {
        if (count->parsed()) return cmd_count(count_q, count_r, out);
        if (bessel->parsed()) return cmd_bessel(bessel_q, bessel_omega, bessel_x, bessel_path, out);
        if (shells->parsed()) return cmd_shells(shells_q, shells_smax, out);
        if (hardy->parsed()) {
            if (!hardy_schedule.empty() && hardy->count("--s-max") == 0)
                hardy_smax = hardy_schedule.back();
            return cmd_hardy(hardy_q, hardy_r, hardy_smax, hardy_schedule, hardy_window, out);
        }
        if (decay->parsed())
            return cmd_decay(decay_q, decay_phi, decay_rmin, decay_rmax, decay_points, out);
        if (verify->parsed()) return cmd_verify(verify_filter, verify_fast, out);
    } catch (const pcircle::non_convergence_error& e) {
        std::fprintf(stderr, "non-convergence: %s (best estimate %s)\n", e.what(),
                     num(e.best_estimate).c_str());
        return kExitNonConvergence;
    } catch (const pcircle::insufficient_data_error& e) {
        std::fprintf(stderr, "non-convergence: %s\n", e.what());
        return kExitNonConvergence;
    } catch (const pcircle::path_refused_error& e) {
        std::fprintf(stderr, "path refused: %s\n", e.what());
        return kExitNonConvergence;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
