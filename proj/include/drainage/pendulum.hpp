#pragma once

// Periodic orbits of f'' = 8 pi (1 - e^f), the one-dimensional reduction of
// the steady vortex metric equation on rectangular tori.

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace drainage {

struct PhasePoint {
    double f = 0.0;  ///< log of the conformal factor
    double p = 0.0;  ///< df/dx
};

struct TurningPoints {
    double f_min = 0.0;
    double f_max = 0.0;
};

/// H(f, p) = p^2/2 + 8 pi (e^f - f - 1).
double hamiltonian(PhasePoint pt);

/// (df/dx, dp/dx) = (p, 8 pi (1 - e^f)).
PhasePoint vector_field(PhasePoint pt);

/// e^f - f - 1 without cancellation near f = 0.
double potential_u(double f);

/// Roots of 8 pi (e^f - f - 1) = E, f_min <= 0 <= f_max.
TurningPoints turning_points(double energy);

/// Period T(E) by Gauss-Kronrod quadrature after the substitution
/// f = f_min + (f_max - f_min) sin^2(theta). Requires E > 0.
double period(double energy);

/// T(0+) extrapolated from small energies (Richardson in E).
double period_limit();

/// Action I(E) = (1/pi) * integral of sqrt(2E - 16 pi U(f)) df. I(0) = 0.
double action(double energy);

/// Energy E with T(E) = minimal_period. Throws std::domain_error when
/// minimal_period <= sqrt(pi/2).
double energy_for_period(double minimal_period);

struct OrbitOptions {
    /// Number of oscillations of f per cell; the minimal period is a / k.
    int oscillations = 1;
    int taylor_order = 24;
    /// Integrator steps per grid spacing; 0 picks a value from the local
    /// Taylor coefficients at the turning points.
    int substeps = 0;
    /// Absolute drift bound, scaled by max(1, E). Exceeding it throws.
    double drift_tolerance = 1e-9;
};

/// One cell of a periodic solution sampled at x_i = i a / n, i = 0..n-1,
/// phased so that x = 0 is a minimum of f.
struct Orbit {
    double a = 0.0;  ///< cell length (torus parameter)
    double energy = 0.0;
    int oscillations = 1;
    std::vector<double> x, f, p, ef;
    double energy_drift = 0.0;   ///< max_i |H(f_i, p_i) - E|
    double closure_error = 0.0;  ///< |state(a) - state(0)| after integration

    std::size_t size() const { return x.size(); }
    double minimal_period() const { return a / oscillations; }
    bool flat() const { return energy == 0.0; }
};

Orbit solve_orbit(double a, std::size_t n_samples, const OrbitOptions& options = {});

/// The trivial solution f = 0 on a cell of length a.
Orbit flat_orbit(double a, std::size_t n_samples);

/// CSV with header x,f,p,ef.
void write_orbit_csv(std::ostream& out, const Orbit& orbit);

}  // namespace drainage
