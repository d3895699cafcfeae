#pragma once

// Heat kernel, Green's function, Epstein zeta function and Robin constant of
// flat rectangular tori R^n / (L_1 Z x ... x L_n Z), n = 2 or 3.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace drainage {

class FlatTorus {
public:
    explicit FlatTorus(std::vector<double> sides);

    /// R^2/(a Z x a^{-1} Z), the conformal class used for the vortex tori.
    static FlatTorus rectangle(double a);

    int dimension() const { return static_cast<int>(sides_.size()); }
    std::span<const double> sides() const { return sides_; }
    double volume() const { return volume_; }
    double shortest_side() const;
    double longest_side() const;

    /// Ewald splitting time L_min L_max / (4 pi).
    double ewald_time() const;

    /// Minimal-image representative of x, each coordinate in [-L/2, L/2).
    std::vector<double> minimal_image(std::span<const double> x) const;

private:
    std::vector<double> sides_;
    double volume_ = 0.0;
};

/// K(p, p, t) from the eigenfunction expansion (1/V) sum_k exp(-|k|^2 t).
double heat_kernel_diag(const FlatTorus& torus, double t);

/// K(p, p, t) from the Gaussian images (4 pi t)^{-n/2} sum_R exp(-|R|^2/(4t)).
double heat_kernel_diag_images(const FlatTorus& torus, double t);

struct HeatDiagnostics {
    double t = 0.0;
    double k_spectral = 0.0;
    double k_images = 0.0;
    double relative_gap() const;
};

HeatDiagnostics heat_diagnostics(const FlatTorus& torus, double t);

/// Zero-mean Green's function G(x) = int_0^inf (K(x, 0, t) - 1/V) dt by
/// Ewald splitting. Throws std::domain_error at lattice points.
double green(const FlatTorus& torus, std::span<const double> x);

/// lim [G(x) + log|x|/(2 pi)] (n = 2) or lim [G(x) - 1/(4 pi |x|)] (n = 3),
/// by Richardson extrapolation along an irrational direction.
double robin_via_green_limit(const FlatTorus& torus);

struct TimeIntegralOptions {
    /// Keep the (log 4 - gamma)/(4 pi) shift in the even-dimensional counterterm.
    bool include_log_shift = true;
};

/// Regularized int_eps^inf (K(p,p,t) - 1/V) dt with the small-time
/// counterterms of the flat heat expansion removed.
double robin_via_time_integral(const FlatTorus& torus, const TimeIntegralOptions& options = {});

/// Analytic continuation of zeta(s) = sum_k 1/(V |k|^{2s}) through the
/// incomplete-gamma representation. Undefined at s = n/2 and, for n = 2, at s = 1.
double epstein_zeta(const FlatTorus& torus, double s);

/// n even: lim_{s->1} [zeta(s) - 1/(4 pi (s - 1))]; n odd: zeta(1).
double zeta_regular_value_at_one(const FlatTorus& torus);

/// Robin constant from the regularized zeta value at s = 1.
double robin_via_zeta(const FlatTorus& torus);

/// Upper incomplete gamma Gamma(a, x) for any real a and x > 0.
double upper_incomplete_gamma(double a, double x);

}  // namespace drainage
