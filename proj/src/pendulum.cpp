#include "drainage/pendulum.hpp"

#include "drainage/common.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace drainage {

namespace {

// e^d - 1 - d
double expm1_minus_linear(double d) {
    if (std::abs(d) < 0.5) {
        double term = d * d / 2.0;
        double sum = term;
        for (int k = 3; k < 30; ++k) {
            term *= d / k;
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return std::expm1(d) - d;
}

// U(f + d) - U(f), accurate for small d.
double potential_gap(double f, double d) {
    return d * std::expm1(f) + std::exp(f) * expm1_minus_linear(d);
}

// p^2 = 16 pi (U(end) - U(f)) at f = f_min + span sin^2(theta).
// The offset from the nearer turning point is formed directly, never by subtraction.
double momentum_squared(const TurningPoints& tp, double theta) {
    const double span = tp.f_max - tp.f_min;
    if (theta < kPi / 4) {
        const double s = std::sin(theta);
        const double d = span * s * s;
        return 16.0 * kPi * potential_gap(tp.f_min + d, -d);
    }
    const double c = std::cos(theta);
    const double d = span * c * c;
    return 16.0 * kPi * potential_gap(tp.f_max - d, d);
}

template <class Integrand>
double integrate_theta(Integrand&& g) {
    using boost::math::quadrature::gauss_kronrod;
    double error = 0.0;
    return gauss_kronrod<double, 61>::integrate(g, 0.0, kPi / 2, 12, 1e-13, &error);
}

void require_energy(double energy) {
    if (!(energy >= 0.0) || !std::isfinite(energy))
        throw std::domain_error("energy must be finite and >= 0, got " + format_double(energy));
}

// Taylor coefficients of (f, e^f) about `start` for f'' = 8 pi (1 - e^f).
struct TaylorSeries {
    std::vector<double> f, g;

    // One extra coefficient so that p = f' is also accurate to the requested order.
    TaylorSeries(PhasePoint start, int order) : f(order + 2, 0.0), g(order + 2, 0.0) {
        f[0] = start.f;
        f[1] = start.p;
        g[0] = std::exp(start.f);
        for (int k = 0; k + 2 <= order + 1; ++k) {
            if (k >= 1) {
                double s = 0.0;
                for (int j = 1; j <= k; ++j) s += j * f[j] * g[k - j];
                g[k] = s / k;
            }
            f[k + 2] = kEightPi * ((k == 0 ? 1.0 : 0.0) - g[k]) / ((k + 1.0) * (k + 2.0));
        }
    }

    PhasePoint evaluate(double h) const {
        const int n = static_cast<int>(f.size()) - 1;
        double value = f[n];
        double slope = n * f[n];
        for (int k = n - 1; k >= 0; --k) value = value * h + f[k];
        for (int k = n - 1; k >= 1; --k) slope = slope * h + k * f[k];
        return {value, slope};
    }

    double tail(double h) const {
        const int n = static_cast<int>(f.size()) - 1;
        return std::abs(f[n]) * std::pow(h, n) + std::abs(f[n - 1]) * std::pow(h, n - 1);
    }
};

}  // namespace

double hamiltonian(PhasePoint pt) {
    return 0.5 * pt.p * pt.p + kEightPi * potential_u(pt.f);
}

PhasePoint vector_field(PhasePoint pt) {
    return {pt.p, -kEightPi * std::expm1(pt.f)};
}

double potential_u(double f) { return expm1_minus_linear(f); }

TurningPoints turning_points(double energy) {
    require_energy(energy);
    if (energy == 0.0) return {};
    const double level = energy / kEightPi;
    auto g = [level](double f) { return potential_u(f) - level; };
    boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 2);
    std::uintmax_t iters = 200;
    const auto lo = boost::math::tools::toms748_solve(g, -(level + 2.0), 0.0, tol, iters);
    iters = 200;
    const auto hi = boost::math::tools::toms748_solve(g, 0.0, 2.0 * std::sqrt(2.0 * level), tol, iters);
    return {0.5 * (lo.first + lo.second), 0.5 * (hi.first + hi.second)};
}

double period(double energy) {
    require_energy(energy);
    if (energy == 0.0)
        throw std::domain_error("period is only defined as a limit at E = 0; use period_limit()");
    const TurningPoints tp = turning_points(energy);
    const double span = tp.f_max - tp.f_min;
    auto integrand = [&](double theta) {
        const double s = std::sin(theta);
        const double c = std::cos(theta);
        const double w = momentum_squared(tp, theta);
        if (w <= 0.0) return 0.0;
        return 2.0 * span * 2.0 * s * c / std::sqrt(w);
    };
    return integrate_theta(integrand);
}

double period_limit() {
    // T is analytic in E near 0; eliminate the linear, quadratic, ... terms.
    constexpr int levels = 6;
    std::array<std::array<double, levels>, levels> table{};
    double energy = 0.02;
    for (int i = 0; i < levels; ++i, energy /= 2.0) {
        table[i][0] = period(energy);
        double factor = 1.0;
        for (int j = 1; j <= i; ++j) {
            factor *= 2.0;
            table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
        }
    }
    return table[levels - 1][levels - 1];
}

double action(double energy) {
    require_energy(energy);
    if (energy == 0.0) return 0.0;
    const TurningPoints tp = turning_points(energy);
    const double span = tp.f_max - tp.f_min;
    auto integrand = [&](double theta) {
        const double s = std::sin(theta);
        const double c = std::cos(theta);
        const double w = momentum_squared(tp, theta);
        return w <= 0.0 ? 0.0 : std::sqrt(w) * span * 2.0 * s * c;
    };
    return integrate_theta(integrand) / kPi;
}

double energy_for_period(double minimal_period) {
    if (!(minimal_period > kBifurcationPeriod) || !std::isfinite(minimal_period))
        throw std::domain_error("torus period must exceed the bifurcation threshold sqrt(pi/2) = " +
                                format_double(kBifurcationPeriod) + ", got " +
                                format_double(minimal_period));
    auto g = [minimal_period](double e) { return period(e) - minimal_period; };
    double lo = 1e-10;
    if (g(lo) >= 0.0)
        throw std::domain_error("torus period " + format_double(minimal_period) +
                                " is too close to the bifurcation threshold sqrt(pi/2)");
    // T(E) > sqrt(2E)/(4 pi) bounds the root from above.
    const double hi = 8.0 * kPi * kPi * minimal_period * minimal_period;
    boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 3);
    std::uintmax_t iters = 300;
    const auto root = boost::math::tools::toms748_solve(g, lo, hi, tol, iters);
    if (iters >= 300) throw NumericalError("energy_for_period: root solve did not converge");
    return 0.5 * (root.first + root.second);
}

Orbit solve_orbit(double a, std::size_t n_samples, const OrbitOptions& options) {
    if (n_samples < 64) throw std::domain_error("solve_orbit needs n_samples >= 64");
    if (options.oscillations < 1) throw std::domain_error("oscillations must be >= 1");
    if (options.taylor_order < 2) throw std::domain_error("taylor_order must be >= 2");
    const double minimal = a / options.oscillations;
    const double energy = energy_for_period(minimal);
    const TurningPoints tp = turning_points(energy);

    const double spacing = a / static_cast<double>(n_samples);
    int substeps = options.substeps;
    if (substeps <= 0) {
        const std::array<PhasePoint, 3> probes = {
            PhasePoint{tp.f_min, 0.0}, PhasePoint{tp.f_max, 0.0},
            PhasePoint{0.0, std::sqrt(2.0 * energy)}};
        substeps = 1;
        for (const auto& probe : probes) {
            const TaylorSeries series(probe, options.taylor_order);
            while (series.tail(spacing / substeps) > 1e-17 * (1.0 + std::abs(probe.f)) &&
                   substeps < 1 << 16)
                substeps *= 2;
        }
    }
    const double h = spacing / substeps;

    Orbit orbit;
    orbit.a = a;
    orbit.energy = energy;
    orbit.oscillations = options.oscillations;
    orbit.x.resize(n_samples);
    orbit.f.resize(n_samples);
    orbit.p.resize(n_samples);
    orbit.ef.resize(n_samples);

    const PhasePoint start{tp.f_min, 0.0};
    PhasePoint state = start;
    double drift = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        orbit.x[i] = spacing * static_cast<double>(i);
        orbit.f[i] = state.f;
        orbit.p[i] = state.p;
        orbit.ef[i] = std::exp(state.f);
        drift = std::max(drift, std::abs(hamiltonian(state) - energy));
        for (int s = 0; s < substeps; ++s) state = TaylorSeries(state, options.taylor_order).evaluate(h);
    }
    orbit.energy_drift = drift;
    orbit.closure_error = std::hypot(state.f - start.f, state.p - start.p);
    if (drift > options.drift_tolerance * std::max(1.0, energy))
        throw NumericalError("solve_orbit: energy drift " + format_double(drift) +
                             " exceeds tolerance at a = " + format_double(a));
    return orbit;
}

Orbit flat_orbit(double a, std::size_t n_samples) {
    if (!(a > 0.0)) throw std::domain_error("flat_orbit needs a > 0");
    Orbit orbit;
    orbit.a = a;
    orbit.x.resize(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) orbit.x[i] = a * static_cast<double>(i) / n_samples;
    orbit.f.assign(n_samples, 0.0);
    orbit.p.assign(n_samples, 0.0);
    orbit.ef.assign(n_samples, 1.0);
    return orbit;
}

void write_orbit_csv(std::ostream& out, const Orbit& orbit) {
    out << "x,f,p,ef\n";
    for (std::size_t i = 0; i < orbit.size(); ++i)
        out << format_double(orbit.x[i]) << ',' << format_double(orbit.f[i]) << ','
            << format_double(orbit.p[i]) << ',' << format_double(orbit.ef[i]) << '\n';
}

}  // namespace drainage
