#pragma once

// Isometric embedding of the steady vortex cylinder as a surface of
// revolution about the X axis: X = X(x), Y = F sin(2 pi a y), Z = F cos(2 pi a y).

#include "drainage/pendulum.hpp"

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace drainage {

struct GeneratorCurve {
    double a = 0.0;
    std::vector<double> x, X, F;
    std::vector<double> dX;         ///< X'(x) = e^{f/2} sqrt(1 - f'^2/(16 pi^2 a^2))
    std::vector<double> radicand;   ///< 1 - f'^2/(16 pi^2 a^2)
    double axial_advance = 0.0;     ///< X(a) - X(0)
    double radicand_bound = 1.0;    ///< 1 - 2E/(16 pi^2 a^2)

    std::size_t size() const { return x.size(); }
    double min_radicand() const;
};

GeneratorCurve generator_curve(const Orbit& orbit);

/// max |X'^2 + F'^2 - e^f| with X' and F' taken from the trigonometric
/// interpolant of the sampled curve (X minus its linear advance is periodic).
double pullback_check(const GeneratorCurve& curve, const Orbit& orbit);

struct RevolutionMesh {
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<std::size_t, 3>> triangles;  ///< 0-based
    std::size_t n_axial = 0;
    std::size_t n_angular = 0;
};

/// Rings at every curve sample plus the closing ring, repeated `tiles`
/// times along the axis; n_axial = tiles * samples + 1.
RevolutionMesh mesh(const GeneratorCurve& curve, std::size_t n_angular, std::size_t tiles = 1);

/// Wavefront OBJ: v lines then f lines with 1-based indices.
void write_obj(std::ostream& out, const RevolutionMesh& m);

/// CSV with header x,X,F.
void write_generator_csv(std::ostream& out, const GeneratorCurve& curve);

}  // namespace drainage
