#pragma once

// The steady vortex metric equation  Delta f = 8 pi - 8 pi e^f  on the flat
// torus R^2/(a Z x a^{-1} Z), solved as a genuinely two-dimensional problem.

#include "drainage/pendulum.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace drainage {

/// Samples f(x_i, y_j), x_i = i a/nx, y_j = j/(a ny), row-major with x slow.
struct PeriodicField {
    double a = 1.0;
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<double> values;

    PeriodicField() = default;
    /// Zero field; nx and ny must be even and >= 16.
    PeriodicField(double a, std::size_t nx, std::size_t ny);

    double& operator()(std::size_t i, std::size_t j) { return values[i * ny + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values[i * ny + j]; }
    double x(std::size_t i) const { return a * static_cast<double>(i) / static_cast<double>(nx); }
    double y(std::size_t j) const { return static_cast<double>(j) / (a * static_cast<double>(ny)); }
    double max_abs() const;
    /// Grid mean of e^f; the torus has unit area so this is the metric volume.
    double volume() const;
};

/// -amplitude cos(2 pi x / a): the linearly unstable mode, minimum at x = 0.
PeriodicField cosine_seed(double a, std::size_t nx, std::size_t ny, double amplitude);

/// The y-independent field of an ODE orbit, resampled spectrally onto nx points.
PeriodicField lift_orbit(const Orbit& orbit, std::size_t nx, std::size_t ny);

/// r = Delta f - 8 pi + 8 pi e^f with the spectral Laplacian.
PeriodicField residual(const PeriodicField& field);

/// Spectral Laplacian of the field.
PeriodicField laplacian(const PeriodicField& field);

struct NewtonStep {
    int iteration = 0;
    double residual = 0.0;  ///< max |r| before the step
    double damping = 1.0;
    int krylov_iterations = 0;
};

struct SolveOptions {
    double tolerance = 1e-10;  ///< on max |r|
    int max_iterations = 60;
    int krylov_restart = 60;
    int krylov_max_iterations = 600;
    /// Newton on (1 + 1/|f|^2) r, which repels iterates from f = 0.
    bool deflate_trivial = false;
};

struct SolveResult {
    PeriodicField field;
    std::vector<NewtonStep> trace;
    double residual = 0.0;
    /// max |f| below 1e-6
    bool trivial() const;
};

/// Damped Newton-Krylov. Throws NumericalError (with the iteration trace in
/// the message) if the residual does not reach the tolerance.
SolveResult solve(const PeriodicField& init, const SolveOptions& options = {});

/// One line per Newton step: "iteration residual damping krylov_iterations".
void write_solver_log(std::ostream& out, const SolveResult& result);

/// CSV with header i,j,x,y,f.
void write_field_csv(std::ostream& out, const PeriodicField& field);

struct ScanOptions {
    std::size_t nx = 32;
    std::size_t ny = 16;
    double seed_amplitude = 1.0;
    std::size_t threads = 0;
};

struct BranchPoint {
    double a = 0.0;
    bool nontrivial = false;
    double amplitude = 0.0;  ///< max f - min f of the solution found
    double residual = 0.0;
    double y_variation = 0.0;  ///< max over x of (max_y f - min_y f)
    int iterations = 0;
};

/// For each a, Newton from a cosine seed and, if that collapses to f = 0,
/// deflated Newton; reports whether a nontrivial solution was found.
std::vector<BranchPoint> bifurcation_scan(std::span<const double> a_grid, const ScanOptions& options = {});

/// Smallest a in a sorted scan with a nontrivial solution, or NaN.
double first_nontrivial(std::span<const BranchPoint> scan);

/// Eigenvalue of Delta + 8 pi on the mode cos(2 pi m x / a) cos(2 pi n a y).
double linearized_eigenvalue(double a, int m, int n);

/// Eigenvalue of Delta + 8 pi closest to zero over all modes, with its (m, n).
struct CriticalMode {
    double eigenvalue = 0.0;
    int m = 0;
    int n = 0;
};
CriticalMode critical_mode(double a);

}  // namespace drainage
