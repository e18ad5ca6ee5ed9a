#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <set>

#include "oracles.hpp"
#include "pcircle/pgeom.hpp"
#include "pcircle/verify.hpp"

using namespace pcircle;
using Catch::Approx;

TEST_CASE("PExponent validation") {
    CHECK(PExponent{1}.p() == 2.0);
    CHECK(PExponent{2}.p() == 1.0);
    CHECK(PExponent{4}.p() == 0.5);
    CHECK_THROWS_AS(PExponent{0}, std::invalid_argument);
    CHECK_THROWS_AS(PExponent{-3}, std::invalid_argument);
}

TEST_CASE("p_norm examples") {
    CHECK(p_norm(3.0, 4.0, PExponent{1}) == Approx(5.0).epsilon(1e-14));
    CHECK(p_norm(1.0, 1.0, PExponent{2}) == Approx(2.0).epsilon(1e-14));
    for (int q = 1; q <= 5; ++q) {
        CHECK(p_norm(1.0, 0.0, PExponent{q}) == Approx(1.0).epsilon(1e-14));
        CHECK(p_norm(0.0, 0.0, PExponent{q}) == 0.0);
    }
}

TEST_CASE("distorted polar examples") {
    auto dp = to_distorted_polar(1.0, 1.0, PExponent{2});
    CHECK(dp.r == Approx(2.0).epsilon(1e-14));
    CHECK(dp.phi == Approx(std::numbers::pi / 4.0).epsilon(1e-14));

    auto dp2 = to_distorted_polar(1.0, 0.0, PExponent{3});
    CHECK(dp2.r == Approx(1.0).epsilon(1e-14));
    CHECK(dp2.phi == Approx(0.0).margin(1e-15));

    auto dp3 = to_distorted_polar(0.0, -2.0, PExponent{1});
    CHECK(dp3.r == Approx(2.0).epsilon(1e-14));
    CHECK(dp3.phi == Approx(3.0 * std::numbers::pi / 2.0).epsilon(1e-14));

    auto [x1, x2] = from_distorted_polar({2.0, std::numbers::pi / 4.0}, PExponent{2});
    CHECK(x1 == Approx(1.0).epsilon(1e-14));
    CHECK(x2 == Approx(1.0).epsilon(1e-14));

    auto [y1, y2] = from_distorted_polar({1.0, std::numbers::pi / 4.0}, PExponent{1});
    CHECK(y1 == Approx(std::sqrt(0.5)).epsilon(1e-14));
    CHECK(y2 == Approx(std::sqrt(0.5)).epsilon(1e-14));

    CHECK_THROWS_AS(to_distorted_polar(0.0, 0.0, PExponent{1}), std::domain_error);
}

TEST_CASE("distorted polar round trip across exponents") {
    for (int q = 1; q <= 4; ++q) {
        PExponent p{q};
        for (double r : {0.01, 1.0, 42.0, 100.0}) {
            for (int i = 0; i < 256; ++i) {
                double phi = 2.0 * std::numbers::pi * (i + 0.3) / 256.0;
                auto [x1, x2] = from_distorted_polar({r, phi}, p);
                auto back = to_distorted_polar(x1, x2, p);
                REQUIRE(back.r == Approx(r).epsilon(1e-12));
                REQUIRE(back.phi == Approx(phi).margin(1e-12));
                REQUIRE(p_norm(x1, x2, p) == Approx(r).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("area term closed forms") {
    CHECK(area_term(PExponent{1}, 1.0) == Approx(std::numbers::pi).epsilon(1e-14));
    CHECK(area_term(PExponent{2}, 1.0) == Approx(2.0).epsilon(1e-14));
    CHECK(area_term(PExponent{3}, 1.0) == Approx(3.0 * std::numbers::pi / 8.0).epsilon(1e-14));
    CHECK(area_term(PExponent{1}, 2.5) == Approx(std::numbers::pi * 6.25).epsilon(1e-14));
}

TEST_CASE("count examples") {
    CHECK(count_lattice_points(PExponent{1}, 1.5) == 9);
    CHECK(count_lattice_points(PExponent{2}, 1.5) == 5);
    for (int q = 1; q <= 4; ++q) CHECK(count_lattice_points(PExponent{q}, 0.5) == 1);
    CHECK_THROWS_AS(count_lattice_points(PExponent{1}, 0.0), std::domain_error);
    CHECK_THROWS_AS(count_lattice_points(PExponent{1}, 4e9), std::overflow_error);
}

TEST_CASE("count agrees with brute force everywhere tested") {
    for (int q = 1; q <= 4; ++q) {
        PExponent p{q};
        for (double r = 0.3; r < 21.0; r += 0.83) {
            INFO("q=" << q << " r=" << r);
            REQUIRE(count_lattice_points(p, r) == verify::count_brute_force(p, r));
        }
        // boundary radii: both sides must still agree (same canonical predicate)
        for (double r : {1.0, 2.0, 5.0, std::sqrt(2.0), 13.0}) {
            INFO("q=" << q << " boundary r=" << r);
            REQUIRE(count_lattice_points(p, r) == verify::count_brute_force(p, r));
        }
    }
}

TEST_CASE("error term direct") {
    auto res = error_term_direct(PExponent{1}, 1.5);
    CHECK(res.count == 9);
    CHECK(res.value == Approx(9.0 - 2.25 * std::numbers::pi).epsilon(1e-14));
    CHECK_FALSE(res.boundary_flag);

    auto res2 = error_term_direct(PExponent{2}, 1.5);
    CHECK(res2.value == Approx(0.5).epsilon(1e-14));

    // single point: count 1, value 1 - area
    for (int q = 1; q <= 3; ++q) {
        auto r3 = error_term_direct(PExponent{q}, 0.5);
        CHECK(r3.value == Approx(1.0 - area_term(PExponent{q}, 0.5)).epsilon(1e-14));
    }

    // radius through the lattice point (1, 0) raises the boundary flag
    auto rb = error_term_direct(PExponent{1}, 1.0);
    CHECK(rb.boundary_flag);
}

TEST_CASE("shell enumeration examples") {
    auto s1 = enumerate_shells(PExponent{1}, 1.0);
    REQUIRE(s1.size() == 1);
    CHECK(s1[0].s == 1.0);
    REQUIRE(s1[0].points.size() == 4);
    std::multiset<double> angles(s1[0].angles.begin(), s1[0].angles.end());
    std::multiset<double> expect{0.0, std::numbers::pi / 2.0, std::numbers::pi,
                                 3.0 * std::numbers::pi / 2.0};
    auto it = expect.begin();
    for (double a : angles) CHECK(a == Approx(*it++).margin(1e-14));

    // no shell between the realized values: R(3) = 0
    auto s2 = enumerate_shells(PExponent{1}, 3.5);
    REQUIRE(s2.size() == 2);
    CHECK(s2[0].s == 1.0);
    CHECK(s2[1].s == 2.0);

    auto s3 = enumerate_shells(PExponent{2}, 2.0);
    REQUIRE(s3.size() == 2);
    CHECK(s3[0].points.size() == 4);
    CHECK(s3[1].points.size() == 8); // bound 4*floor(2) attained

    CHECK_THROWS_AS(enumerate_shells(PExponent{1}, 0.5), std::invalid_argument);
}

TEST_CASE("shells are ascending, lexicographic and complete") {
    for (int q = 1; q <= 4; ++q) {
        PExponent p{q};
        double s_max = 18.7;
        auto shells = enumerate_shells(p, s_max);
        std::int64_t total = 0;
        double prev_s = 0.0;
        for (const auto& sh : shells) {
            REQUIRE(sh.s > prev_s);
            prev_s = sh.s;
            REQUIRE(sh.angles.size() == sh.points.size());
            for (std::size_t i = 1; i < sh.points.size(); ++i)
                REQUIRE(sh.points[i - 1] < sh.points[i]);
            for (const auto& pt : sh.points)
                REQUIRE(detail::s_value(pt.n1, pt.n2, q) ==
                        Approx(sh.s).epsilon(1e-9));
            total += std::int64_t(sh.points.size());
        }
        // union equals the strict interior count at a radius between shells
        double radius = detail::pow_q_half(s_max, q);
        CHECK(total == count_lattice_points(p, radius) - 1);
    }
}

TEST_CASE("shell cardinality bound holds") {
    for (int q = 1; q <= 4; ++q) {
        double s_max = (q <= 2) ? 300.0 : 25.0;
        for (const auto& sh : enumerate_shells(PExponent{q}, s_max)) {
            double bound = 4.0 * std::floor(detail::pow_q_half(sh.s, q) + 1e-12);
            REQUIRE(double(sh.points.size()) <= bound);
        }
    }
}

TEST_CASE("shell angles map back to the lattice points") {
    for (int q = 1; q <= 4; ++q) {
        PExponent p{q};
        for (const auto& sh : enumerate_shells(p, 9.5)) {
            double radius = detail::pow_q_half(sh.s, q);
            for (std::size_t i = 0; i < sh.points.size(); ++i) {
                auto [x1, x2] = from_distorted_polar({radius, sh.angles[i]}, p);
                CHECK(x1 == Approx(double(sh.points[i].n1)).margin(1e-9));
                CHECK(x2 == Approx(double(sh.points[i].n2)).margin(1e-9));
            }
        }
    }
}

TEST_CASE("shell_multiplicity matches enumeration") {
    for (int q = 1; q <= 4; ++q) {
        PExponent p{q};
        for (const auto& sh : enumerate_shells(p, 14.2)) {
            auto [s, count] = shell_multiplicity(p, sh.points.front());
            CHECK(s == Approx(sh.s).epsilon(1e-12));
            CHECK(count == std::int64_t(sh.points.size()));
        }
    }
}

TEST_CASE("r2 representation counts") {
    CHECK(r2_function(1) == 4);
    CHECK(r2_function(2) == 4);
    CHECK(r2_function(3) == 0);
    CHECK(r2_function(25) == 12);
    CHECK_THROWS_AS(r2_function(0), std::domain_error);
    for (std::int64_t k = 1; k <= 200; ++k)
        REQUIRE(r2_function(k) == verify::r2_brute_force(k));
    // p = 2 shell cardinality equals R(k)
    for (const auto& sh : enumerate_shells(PExponent{1}, 100.0))
        REQUIRE(std::int64_t(sh.points.size()) == r2_function(std::llround(sh.s)));
}
