#include "drainage/common.hpp"
#include "drainage/pendulum.hpp"
#include "drainage/robin.hpp"

#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace drainage;

namespace {

// log eta(i t) through Euler's pentagonal series, independent of the q-product.
double pentagonal_log_eta(double t) {
    const double q = std::exp(-2.0 * M_PI * t);
    double sum = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        sum += sign * (std::pow(q, k * (3.0 * k - 1.0) / 2.0) + std::pow(q, k * (3.0 * k + 1.0) / 2.0));
    }
    return -M_PI * t / 12.0 + std::log(sum);
}

}  // namespace

TEST_CASE("log eta matches the pentagonal series and the modular relation") {
    for (double t : {0.3, 0.7, 1.0, 1.5, 2.25, 4.0, 9.0}) {
        CHECK(log_dedekind_eta(t) == doctest::Approx(pentagonal_log_eta(t)).epsilon(1e-13));
        CHECK(log_dedekind_eta(1.0 / t) == doctest::Approx(log_dedekind_eta(t) + 0.5 * std::log(t)).epsilon(1e-13));
    }
    // eta(i) = Gamma(1/4) / (2 pi^{3/4})
    CHECK(log_dedekind_eta(1.0) ==
          doctest::Approx(std::log(boost::math::tgamma(0.25) / (2.0 * std::pow(M_PI, 0.75)))).epsilon(1e-14));
}

TEST_CASE("flat Robin constant") {
    const double closed = -std::log(2.0 * M_PI) / (2.0 * M_PI) -
                          std::log(boost::math::tgamma(0.25) / (2.0 * std::pow(M_PI, 0.75))) / M_PI;
    CHECK(robin_flat(1.0) == doctest::Approx(closed).epsilon(1e-13));
    CHECK(std::abs(robin_flat(1.0) - (-0.2085777932435014)) < 1e-13);
    CHECK(std::abs(robin_flat(1.0) + 0.20856) < 5e-5);
    for (double a : {1.1, 1.5, 2.0, 3.7, 6.0})
        CHECK(std::abs(robin_flat(a) - robin_flat(1.0 / a)) < 1e-12);
    // minimal at the square; a^2/12 - log(2 pi a)/(2 pi) for long tori
    CHECK(robin_flat(1.2) > robin_flat(1.0));
    CHECK(robin_flat(6.0) == doctest::Approx(36.0 / 12.0 - std::log(2.0 * M_PI * 6.0) / (2.0 * M_PI)).epsilon(1e-9));
    CHECK_THROWS_AS(robin_flat(0.0), std::domain_error);
}

TEST_CASE("sphere Robin constant") {
    CHECK(robin_sphere() == doctest::Approx(-(1.0 + std::log(M_PI)) / (4.0 * M_PI)).epsilon(1e-15));
    CHECK(std::abs(robin_sphere() + 0.17067) < 1e-5);
}

TEST_CASE("three Robin-difference formulas agree and are negative") {
    for (double energy : {1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
        CAPTURE(energy);
        const Orbit orbit = solve_orbit(period(energy), 2048);
        const RobinDifference d = robin_difference(orbit);
        CHECK(d.max_disagreement() < 1e-8);
        CHECK(d.quadrature < 0.0);
        CHECK(d.energy < 0.0);
        CHECK(d.action < 0.0);
    }
    for (double a : {1.26, 1.5, 2.0, 3.0, 6.0}) {
        CAPTURE(a);
        const RobinDifference d = robin_difference(solve_orbit(a, 2048));
        CHECK(d.max_disagreement() < 1e-8);
        CHECK(d.action < 0.0);
    }
}

TEST_CASE("Robin difference is second order in the energy near the bifurcation") {
    // R1 - R0 = -E/(32 pi^2) + I 2 pi /(32 pi^2 T) and I ~ E T/(2 pi) leave O(E^2).
    const double d1 = robin_difference(solve_orbit(period(1e-2), 1024)).action;
    const double d2 = robin_difference(solve_orbit(period(2e-2), 1024)).action;
    CHECK(d2 / d1 == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("flat orbit has zero Robin difference") {
    const Orbit orbit = flat_orbit(1.0, 256);
    const RobinDifference d = robin_difference(orbit);
    CHECK(d.quadrature == 0.0);
    CHECK(d.action == 0.0);
}

TEST_CASE("curvature integrates to zero over the cell") {
    for (double a : {1.3, 2.0, 4.0}) {
        const Orbit orbit = solve_orbit(a, 1024);
        const auto k = curvature_profile(orbit);
        double k_max = 0.0;
        for (double v : k) k_max = std::max(k_max, std::abs(v));
        CHECK(std::abs(total_curvature(orbit, k)) < 1e-9 * k_max);
        // K > 0 where f > 0
        const auto imax = std::max_element(orbit.f.begin(), orbit.f.end()) - orbit.f.begin();
        CHECK(k[static_cast<std::size_t>(imax)] > 0.0);
    }
}

TEST_CASE("figure 2 table: negative, decreasing difference and R1 approaching the sphere") {
    std::vector<double> grid;
    for (double a = 1.26; a <= 6.0 + 1e-9; a += 0.25) grid.push_back(a);
    const auto reports = figure2_table(grid, {}, 2);
    REQUIRE(reports.size() == grid.size());
    const double rs = robin_sphere();
    for (std::size_t i = 0; i < reports.size(); ++i) {
        CHECK(reports[i].diff.action < 0.0);
        CHECK(reports[i].r1 < rs);
        if (i > 0) {
            CHECK(reports[i].a > reports[i - 1].a);
            CHECK(reports[i].diff.action < reports[i - 1].diff.action);
            CHECK(std::abs(reports[i].r1 - rs) < std::abs(reports[i - 1].r1 - rs));
        }
    }
    CHECK(std::abs(reports.back().r1 - rs) < 1e-3);

    std::ostringstream csv;
    write_figure2_csv(csv, reports);
    const std::string text = csv.str();
    CHECK(text.rfind("a,E,T,I,R0,diff_quad,diff_energy,diff_action,R1\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(grid.size() + 1));
}

TEST_CASE("figure 2 table is independent of the thread count") {
    const std::vector<double> grid = {3.0, 1.5, 2.0, 1.3};
    const auto one = figure2_table(grid, {}, 1);
    const auto four = figure2_table(grid, {}, 4);
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].a == four[i].a);
        CHECK(one[i].r1 == four[i].r1);
    }
    CHECK(one.front().a == 1.3);
}

TEST_CASE("figure 2 rejects values at or below the threshold") {
    const std::vector<double> grid = {1.2, 2.0};
    CHECK_THROWS_AS(figure2_table(grid), std::domain_error);
}
