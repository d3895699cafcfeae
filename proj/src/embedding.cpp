#include "drainage/embedding.hpp"

#include "drainage/common.hpp"
#include "drainage/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace drainage {

double GeneratorCurve::min_radicand() const {
    return radicand.empty() ? 1.0 : *std::min_element(radicand.begin(), radicand.end());
}

GeneratorCurve generator_curve(const Orbit& orbit) {
    const std::size_t n = orbit.size();
    if (n == 0) throw std::invalid_argument("generator_curve: empty orbit");
    const double a = orbit.a;
    const double scale = 16.0 * kPi * kPi * a * a;

    GeneratorCurve c;
    c.a = a;
    c.x = orbit.x;
    c.F.resize(n);
    c.dX.resize(n);
    c.radicand.resize(n);
    c.radicand_bound = 1.0 - 2.0 * orbit.energy / scale;
    for (std::size_t i = 0; i < n; ++i) {
        const double rad = 1.0 - orbit.p[i] * orbit.p[i] / scale;
        if (!(rad > 0.0))
            throw NumericalError("generator_curve: non-positive radicand at x = " +
                                 format_double(orbit.x[i]) + " (internal consistency failure)");
        c.radicand[i] = rad;
        const double half = std::exp(0.5 * orbit.f[i]);
        c.F[i] = half / (2.0 * kPi * a);
        c.dX[i] = half * std::sqrt(rad);
    }
    const double slope = pairwise_sum(c.dX) / static_cast<double>(n);
    c.axial_advance = slope * a;
    c.X = spectral::antiderivative(c.dX, a);
    for (std::size_t i = 0; i < n; ++i) c.X[i] += slope * c.x[i];
    return c;
}

double pullback_check(const GeneratorCurve& curve, const Orbit& orbit) {
    const std::size_t n = curve.size();
    if (orbit.size() != n) throw std::invalid_argument("pullback_check: sampling mismatch");
    const double slope = curve.axial_advance / curve.a;
    std::vector<double> periodic_x(n);
    for (std::size_t i = 0; i < n; ++i) periodic_x[i] = curve.X[i] - slope * curve.x[i];
    auto dX = spectral::derivative(periodic_x, curve.a);
    const auto dF = spectral::derivative(curve.F, curve.a);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xdot = dX[i] + slope;
        worst = std::max(worst, std::abs(xdot * xdot + dF[i] * dF[i] - orbit.ef[i]));
    }
    return worst;
}

RevolutionMesh mesh(const GeneratorCurve& curve, std::size_t n_angular, std::size_t tiles) {
    if (n_angular < 8) throw std::domain_error("mesh needs n_angular >= 8");
    if (tiles < 1) throw std::domain_error("mesh needs tiles >= 1");
    const std::size_t n = curve.size();
    if (n < 2) throw std::domain_error("mesh needs at least two curve samples");

    RevolutionMesh m;
    m.n_angular = n_angular;
    m.n_axial = tiles * n + 1;
    m.vertices.reserve(m.n_axial * n_angular);
    for (std::size_t ring = 0; ring < m.n_axial; ++ring) {
        const std::size_t i = ring % n;
        const double X = curve.X[i] + static_cast<double>(ring / n) * curve.axial_advance;
        const double F = curve.F[i];
        for (std::size_t j = 0; j < n_angular; ++j) {
            const double phi = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n_angular);
            m.vertices.push_back({X, F * std::sin(phi), F * std::cos(phi)});
        }
    }
    m.triangles.reserve(2 * (m.n_axial - 1) * n_angular);
    for (std::size_t ring = 0; ring + 1 < m.n_axial; ++ring) {
        for (std::size_t j = 0; j < n_angular; ++j) {
            const std::size_t jn = (j + 1) % n_angular;
            const std::size_t v00 = ring * n_angular + j;
            const std::size_t v01 = ring * n_angular + jn;
            const std::size_t v10 = (ring + 1) * n_angular + j;
            const std::size_t v11 = (ring + 1) * n_angular + jn;
            m.triangles.push_back({v00, v10, v11});
            m.triangles.push_back({v00, v11, v01});
        }
    }
    return m;
}

void write_obj(std::ostream& out, const RevolutionMesh& m) {
    for (const auto& v : m.vertices)
        out << "v " << format_double(v[0]) << ' ' << format_double(v[1]) << ' '
            << format_double(v[2]) << '\n';
    for (const auto& t : m.triangles)
        out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void write_generator_csv(std::ostream& out, const GeneratorCurve& curve) {
    out << "x,X,F\n";
    for (std::size_t i = 0; i < curve.size(); ++i)
        out << format_double(curve.x[i]) << ',' << format_double(curve.X[i]) << ','
            << format_double(curve.F[i]) << '\n';
    // closing sample at x = a
    out << format_double(curve.a) << ',' << format_double(curve.X[0] + curve.axial_advance) << ','
        << format_double(curve.F[0]) << '\n';
}

}  // namespace drainage
