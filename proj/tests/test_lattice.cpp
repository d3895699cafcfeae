#include "drainage/lattice.hpp"
#include "drainage/robin.hpp"

#include <doctest.h>

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <vector>

using namespace drainage;

namespace {

constexpr double kGamma = 0.57721566490153286061;

// Known lattice constant of the simple cubic lattice with neutralizing background.
constexpr double kCubicMadelung = -2.8372974794806;

// sum over nonzero m in Z^3 of |m|^{-6} by direct summation plus the continuum tail.
double cubic_sum_inverse_sixth() {
    constexpr int r = 40;
    double sum = 0.0;
    for (int i = -r; i <= r; ++i)
        for (int j = -r; j <= r; ++j)
            for (int k = -r; k <= r; ++k) {
                const double m2 = double(i) * i + double(j) * j + double(k) * k;
                if (m2 == 0.0 || m2 > double(r) * r) continue;
                sum += 1.0 / (m2 * m2 * m2);
            }
    return sum + 4.0 * M_PI / (3.0 * r * r * r);
}

}  // namespace

TEST_CASE("flat torus basics") {
    const FlatTorus t = FlatTorus::rectangle(2.0);
    CHECK(t.dimension() == 2);
    CHECK(t.volume() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(t.shortest_side() == 0.5);
    CHECK(t.longest_side() == 2.0);
    CHECK(t.ewald_time() == doctest::Approx(1.0 / (4.0 * M_PI)));
    const std::vector<double> x = {1.3, -0.3};
    const auto y = t.minimal_image(x);
    CHECK(y[0] == doctest::Approx(-0.7));
    CHECK(y[1] == doctest::Approx(0.2));
    CHECK_THROWS_AS(FlatTorus({1.0}), std::domain_error);
    CHECK_THROWS_AS(FlatTorus({1.0, -1.0}), std::domain_error);
}

TEST_CASE("heat kernel: eigenvalue and image sums agree") {
    const std::vector<FlatTorus> tori = {FlatTorus::rectangle(1.0), FlatTorus::rectangle(1.5),
                                         FlatTorus::rectangle(2.0), FlatTorus({1.0, 1.0, 1.0}),
                                         FlatTorus({1.0, 1.3, 0.8})};
    for (const auto& torus : tori)
        for (double t = 1e-3; t <= 10.0; t *= 1.7) {
            const HeatDiagnostics d = heat_diagnostics(torus, t);
            CHECK(d.relative_gap() < 1e-12);
        }
    const FlatTorus square = FlatTorus::rectangle(1.0);
    CHECK(heat_kernel_diag(square, 50.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(heat_kernel_diag(square, 1e-3) == doctest::Approx(1.0 / (4.0 * M_PI * 1e-3)).epsilon(1e-12));
    CHECK_THROWS_AS(heat_kernel_diag(square, 0.0), std::domain_error);
}

TEST_CASE("Green's function: symmetry, periodicity and the Poisson equation") {
    for (const auto& torus : {FlatTorus::rectangle(1.5), FlatTorus({1.0, 1.0, 1.0})}) {
        const int n = torus.dimension();
        std::vector<double> x = {0.21, -0.17, 0.33};
        x.resize(n);
        std::vector<double> minus(n), shifted(n);
        for (int i = 0; i < n; ++i) {
            minus[i] = -x[i];
            shifted[i] = x[i] + torus.sides()[i];
        }
        const double g = green(torus, x);
        CHECK(green(torus, minus) == doctest::Approx(g).epsilon(1e-13));
        CHECK(green(torus, shifted) == doctest::Approx(g).epsilon(1e-13));

        // Delta G = 1/V away from the pole
        const double h = 1e-3;
        double lap = 0.0;
        for (int i = 0; i < n; ++i) {
            auto xp = x;
            auto xm = x;
            xp[i] += h;
            xm[i] -= h;
            lap += (green(torus, xp) - 2.0 * g + green(torus, xm)) / (h * h);
        }
        CHECK(lap == doctest::Approx(1.0 / torus.volume()).epsilon(1e-4));

        std::vector<double> origin(n, 0.0);
        CHECK_THROWS_AS(green(torus, origin), std::domain_error);
    }
}

TEST_CASE("Green's function has zero mean") {
    // midpoint rule on a grid that avoids the pole; the log singularity is integrable
    const FlatTorus torus = FlatTorus::rectangle(1.0);
    constexpr int m = 64;
    double sum = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const std::vector<double> x = {(i + 0.5) / m, (j + 0.5) / m};
            sum += green(torus, x);
        }
    CHECK(std::abs(sum / (m * m)) < 2e-4);
}

TEST_CASE("flat 2-torus Robin constant: four routes agree") {
    for (double a : {1.0, 1.5, 2.0}) {
        CAPTURE(a);
        const FlatTorus torus = FlatTorus::rectangle(a);
        const double eta = robin_flat(a);
        CHECK(std::abs(robin_via_green_limit(torus) - eta) < 1e-9);
        CHECK(std::abs(robin_via_time_integral(torus) - eta) < 1e-9);
        CHECK(std::abs(robin_via_zeta(torus) - eta) < 1e-9);
    }
}

TEST_CASE("time integral without the log shift") {
    const FlatTorus torus = FlatTorus::rectangle(1.5);
    const double with = robin_via_time_integral(torus);
    const double without = robin_via_time_integral(torus, {false});
    CHECK(with - without == doctest::Approx((std::log(4.0) - kGamma) / (4.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("cubic 3-torus Robin constant") {
    const FlatTorus cube({1.0, 1.0, 1.0});
    const double green_route = robin_via_green_limit(cube);
    const double time_route = robin_via_time_integral(cube);
    const double zeta_route = robin_via_zeta(cube);
    CHECK(std::abs(green_route - time_route) < 1e-9);
    CHECK(std::abs(green_route - zeta_route) < 1e-9);
    CHECK(std::abs(time_route - zeta_route) < 1e-9);
    CHECK(zeta_route == doctest::Approx(kCubicMadelung / (4.0 * M_PI)).epsilon(1e-11));
    // frozen regression value
    CHECK(std::abs(zeta_route - (-0.225784959440758)) < 1e-12);
}

TEST_CASE("Robin constant scales with the cell") {
    // R(lambda L) = R(L) + log(lambda)/(2 pi) in 2D, R(L)/lambda in 3D
    const double r2 = robin_via_zeta(FlatTorus({1.0, 1.0}));
    CHECK(robin_via_zeta(FlatTorus({2.0, 2.0})) == doctest::Approx(r2 + std::log(2.0) / (2.0 * M_PI)).epsilon(1e-11));
    const double r3 = robin_via_zeta(FlatTorus({1.0, 1.0, 1.0}));
    CHECK(robin_via_zeta(FlatTorus({2.0, 2.0, 2.0})) == doctest::Approx(r3 / 2.0).epsilon(1e-11));
}

TEST_CASE("Epstein zeta values") {
    const FlatTorus square = FlatTorus::rectangle(1.0);
    // sum' (m^2 + n^2)^{-2} = 4 zeta(2) beta(2)
    const double catalan = boost::math::constants::catalan<double>();
    const double lattice_sum = 4.0 * (M_PI * M_PI / 6.0) * catalan;
    CHECK(epstein_zeta(square, 2.0) == doctest::Approx(lattice_sum / std::pow(2.0 * M_PI, 4)).epsilon(1e-12));

    const FlatTorus cube({1.0, 1.0, 1.0});
    CHECK(epstein_zeta(cube, 3.0) ==
          doctest::Approx(cubic_sum_inverse_sixth() / std::pow(2.0 * M_PI, 6)).epsilon(1e-5));

    // residue 1/(4 pi) at s = 1 in 2D
    for (double h : {1e-4, 1e-5}) {
        CHECK(h * epstein_zeta(square, 1.0 + h) == doctest::Approx(1.0 / (4.0 * M_PI)).epsilon(20 * h));
    }
    const double regular = zeta_regular_value_at_one(square);
    const double h = 1e-5;
    const double central = 0.5 * (epstein_zeta(square, 1.0 + h) + epstein_zeta(square, 1.0 - h));
    CHECK(central == doctest::Approx(regular).epsilon(1e-6));

    CHECK_THROWS_AS(epstein_zeta(square, 1.0), std::domain_error);
    CHECK_THROWS_AS(epstein_zeta(cube, 1.5), std::domain_error);
}

TEST_CASE("upper incomplete gamma for negative and zero order") {
    for (double x : {0.05, 0.7, 3.0, 12.0}) {
        const double expected = 2.0 * std::exp(-x) / std::sqrt(x) - 2.0 * std::sqrt(M_PI) * std::erfc(std::sqrt(x));
        CHECK(upper_incomplete_gamma(-0.5, x) == doctest::Approx(expected).epsilon(1e-12));
        // Gamma(-1, x) = E_2(x)/x
        const double g1 = upper_incomplete_gamma(-1.0, x);
        const double g0 = upper_incomplete_gamma(0.0, x);
        CHECK(g1 == doctest::Approx((std::exp(-x) / x - g0)).epsilon(1e-12));
        CHECK(upper_incomplete_gamma(1.0, x) == doctest::Approx(std::exp(-x)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(upper_incomplete_gamma(1.0, 0.0), std::domain_error);
}
