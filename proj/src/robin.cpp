#include "drainage/robin.hpp"

#include "drainage/common.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace drainage {

namespace {

double mean(std::span<const double> v) {
    return pairwise_sum(v) / static_cast<double>(v.size());
}

void require_orbit(const Orbit& orbit) {
    const std::size_t n = orbit.size();
    if (n == 0 || orbit.f.size() != n || orbit.p.size() != n || orbit.ef.size() != n ||
        !(orbit.a > 0.0))
        throw std::invalid_argument("malformed orbit");
}

}  // namespace

double log_dedekind_eta(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::domain_error("eta needs t > 0");
    if (t < 1.0) return log_dedekind_eta(1.0 / t) - 0.5 * std::log(t);
    const double q = std::exp(-2.0 * kPi * t);
    double sum = -kPi * t / 12.0;
    double qn = q;
    // log(1 - q^n) ~ -q^n; q <= e^{-2 pi} so the loop is short.
    while (qn >= 1e-18) {
        sum += std::log1p(-qn);
        qn *= q;
    }
    return sum;
}

double robin_flat(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw std::domain_error("robin_flat needs a > 0");
    if (a < 1.0) a = 1.0 / a;
    const double log_eta = log_dedekind_eta(a * a);
    return -std::log(2.0 * kPi) / (2.0 * kPi) - (4.0 * log_eta + 2.0 * std::log(a)) / (4.0 * kPi);
}

double robin_sphere() { return -(1.0 + std::log(kPi)) / (4.0 * kPi); }

double RobinDifference::max_disagreement() const {
    return std::max({std::abs(quadrature - energy), std::abs(energy - action),
                     std::abs(quadrature - action)});
}

RobinDifference robin_difference(const Orbit& orbit) {
    require_orbit(orbit);
    if (orbit.flat()) return {};
    std::vector<double> p2(orbit.size());
    for (std::size_t i = 0; i < orbit.size(); ++i) p2[i] = orbit.p[i] * orbit.p[i];
    const double mean_f = mean(orbit.f);
    const double mean_p2 = mean(p2);
    const double c = 32.0 * kPi * kPi;

    const double energy = orbit.energy;
    const double t = period(energy);
    const double i = action(energy);

    RobinDifference d;
    d.quadrature = mean_f / (4.0 * kPi) + mean_p2 / (64.0 * kPi * kPi);
    d.energy = -energy / c + mean_p2 / c;
    d.action = (i * 2.0 * kPi / t - energy) / c;
    return d;
}

std::vector<double> curvature_profile(const Orbit& orbit) {
    require_orbit(orbit);
    std::vector<double> k(orbit.size());
    for (std::size_t i = 0; i < orbit.size(); ++i) k[i] = -4.0 * kPi * std::expm1(-orbit.f[i]);
    return k;
}

double total_curvature(const Orbit& orbit, std::span<const double> curvature) {
    std::vector<double> density(orbit.size());
    for (std::size_t i = 0; i < orbit.size(); ++i) density[i] = curvature[i] * orbit.ef[i];
    return orbit.a * mean(density);
}

RobinReport robin_report(double a, const RobinOptions& options) {
    OrbitOptions orbit_options;
    orbit_options.oscillations = options.oscillations;
    const Orbit orbit = solve_orbit(a, options.n_samples, orbit_options);
    RobinReport r;
    r.a = a;
    r.energy = orbit.energy;
    r.period = period(orbit.energy);
    r.action = action(orbit.energy);
    r.r0 = robin_flat(a);
    r.diff = robin_difference(orbit);
    r.r1 = r.r0 + r.diff.action;
    if (options.with_curvature) r.curvature = curvature_profile(orbit);
    return r;
}

std::vector<RobinReport> figure2_table(std::span<const double> a_grid, const RobinOptions& options,
                                       std::size_t threads) {
    std::vector<double> grid(a_grid.begin(), a_grid.end());
    std::sort(grid.begin(), grid.end());
    for (double a : grid)
        if (!(a / options.oscillations > kBifurcationPeriod))
            throw std::domain_error("figure2 grid value a = " + format_double(a) +
                                    " does not exceed sqrt(pi/2)");
    std::vector<RobinReport> reports(grid.size());
    parallel_for(grid.size(), thread_count(threads),
                 [&](std::size_t i) { reports[i] = robin_report(grid[i], options); });
    return reports;
}

void write_figure2_csv(std::ostream& out, std::span<const RobinReport> reports) {
    out << "a,E,T,I,R0,diff_quad,diff_energy,diff_action,R1\n";
    for (const auto& r : reports)
        out << format_double(r.a) << ',' << format_double(r.energy) << ','
            << format_double(r.period) << ',' << format_double(r.action) << ','
            << format_double(r.r0) << ',' << format_double(r.diff.quadrature) << ','
            << format_double(r.diff.energy) << ',' << format_double(r.diff.action) << ','
            << format_double(r.r1) << '\n';
}

}  // namespace drainage
