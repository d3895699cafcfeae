#pragma once

// Robin functions of flat rectangular tori, the unit-area round sphere, and
// the non-flat steady vortex tori built from periodic orbits.

#include "drainage/pendulum.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace drainage {

/// log eta(i t) for t > 0 from the q-product, q = exp(-2 pi t); for t < 1 the
/// modular relation eta(i t) = eta(i/t)/sqrt(t) is applied first.
double log_dedekind_eta(double t);

/// Robin constant of the flat torus R^2/(a Z x a^{-1} Z) (unit area).
double robin_flat(double a);

/// Robin constant of the round sphere of area 1: -(1 + log pi)/(4 pi).
double robin_sphere();

/// R1 - R0 evaluated three ways: by quadrature of f and f'^2 over the cell,
/// with f eliminated through the first integral, and through the action.
struct RobinDifference {
    double quadrature = 0.0;
    double energy = 0.0;
    double action = 0.0;

    double max_disagreement() const;
};

RobinDifference robin_difference(const Orbit& orbit);

/// Gaussian curvature K = 4 pi (1 - e^{-f}) of e^f (dx^2 + dy^2) on the grid.
std::vector<double> curvature_profile(const Orbit& orbit);

/// Integral of K e^f over one cell (zero for a torus).
double total_curvature(const Orbit& orbit, std::span<const double> curvature);

struct RobinReport {
    double a = 0.0;
    double energy = 0.0;
    double period = 0.0;  ///< T(E) recomputed by quadrature
    double action = 0.0;
    double r0 = 0.0;
    RobinDifference diff;
    double r1 = 0.0;  ///< r0 + diff.action
    std::optional<std::vector<double>> curvature;
};

struct RobinOptions {
    std::size_t n_samples = 2048;
    int oscillations = 1;
    bool with_curvature = false;
};

RobinReport robin_report(double a, const RobinOptions& options = {});

/// Reports for every a in the grid, sorted by a. Each a must exceed
/// sqrt(pi/2) times the oscillation count.
std::vector<RobinReport> figure2_table(std::span<const double> a_grid,
                                       const RobinOptions& options = {},
                                       std::size_t threads = 0);

/// CSV with header a,E,T,I,R0,diff_quad,diff_energy,diff_action,R1.
void write_figure2_csv(std::ostream& out, std::span<const RobinReport> reports);

}  // namespace drainage
