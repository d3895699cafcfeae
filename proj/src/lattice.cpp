#include "drainage/lattice.hpp"

#include "drainage/common.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace drainage {

namespace {

// exp(-z) below this is dropped from every lattice sum.
constexpr double kCutoffExponent = 45.0;

// Visits every integer vector m with |m_i| <= bounds[i], in lexicographic order.
void for_each_index(std::span<const int> bounds, const std::function<void(const std::array<int, 3>&)>& fn) {
    std::array<int, 3> m{0, 0, 0};
    const int n = static_cast<int>(bounds.size());
    const int b0 = bounds[0];
    const int b1 = n > 1 ? bounds[1] : 0;
    const int b2 = n > 2 ? bounds[2] : 0;
    for (m[0] = -b0; m[0] <= b0; ++m[0])
        for (m[1] = -b1; m[1] <= b1; ++m[1])
            for (m[2] = -b2; m[2] <= b2; ++m[2]) fn(m);
}

// 2 sum_{m>=1} exp(-c m^2) with c > 0.
double theta_tail(double c) {
    double sum = 0.0;
    for (int m = 1;; ++m) {
        const double term = std::exp(-c * m * m);
        sum += term;
        if (term < 1e-18 * (1.0 + sum)) break;
    }
    return 2.0 * sum;
}

// prod_i (1 + s_i) - 1 without cancellation.
double product_minus_one(std::span<const double> s) {
    double p = 0.0;
    for (double v : s) p = p + v + p * v;
    return p;
}

std::vector<double> spectral_tails(const FlatTorus& torus, double t) {
    std::vector<double> s;
    for (double L : torus.sides()) s.push_back(theta_tail(t * 4.0 * kPi * kPi / (L * L)));
    return s;
}

std::vector<double> image_tails(const FlatTorus& torus, double t) {
    std::vector<double> s;
    for (double L : torus.sides()) s.push_back(theta_tail(L * L / (4.0 * t)));
    return s;
}

// (1/V) sum_{k != 0} weight(|k|^2) cos(k . x)
template <class Weight>
double dual_sum(const FlatTorus& torus, std::span<const double> x, double k2_max, Weight&& weight) {
    const auto sides = torus.sides();
    std::vector<int> bounds;
    for (double L : sides)
        bounds.push_back(static_cast<int>(std::ceil(L * std::sqrt(k2_max) / (2.0 * kPi))) + 1);
    std::vector<double> terms;
    for_each_index(bounds, [&](const std::array<int, 3>& m) {
        double k2 = 0.0;
        double phase = 0.0;
        bool zero = true;
        for (std::size_t i = 0; i < sides.size(); ++i) {
            const double k = 2.0 * kPi * m[i] / sides[i];
            k2 += k * k;
            phase += k * (x.empty() ? 0.0 : x[i]);
            zero = zero && m[i] == 0;
        }
        if (zero || k2 > k2_max) return;
        terms.push_back(weight(k2) * std::cos(phase));
    });
    return pairwise_sum(terms) / torus.volume();
}

// sum over lattice vectors R (R = 0 skipped when skip_origin) of weight(|x + R|^2)
template <class Weight>
double real_sum(const FlatTorus& torus, std::span<const double> x, double r2_max, bool skip_origin,
                Weight&& weight) {
    const auto sides = torus.sides();
    std::vector<int> bounds;
    for (double L : sides) bounds.push_back(static_cast<int>(std::ceil(std::sqrt(r2_max) / L)) + 1);
    std::vector<double> terms;
    for_each_index(bounds, [&](const std::array<int, 3>& m) {
        double r2 = 0.0;
        bool zero = true;
        for (std::size_t i = 0; i < sides.size(); ++i) {
            const double d = (x.empty() ? 0.0 : x[i]) + m[i] * sides[i];
            r2 += d * d;
            zero = zero && m[i] == 0;
        }
        if ((skip_origin && zero) || r2 > r2_max) return;
        terms.push_back(weight(r2));
    });
    return pairwise_sum(terms);
}

double e1(double z) { return boost::math::expint(1, z); }

}  // namespace

FlatTorus::FlatTorus(std::vector<double> sides) : sides_(std::move(sides)) {
    if (sides_.size() != 2 && sides_.size() != 3)
        throw std::domain_error("flat torus dimension must be 2 or 3");
    volume_ = 1.0;
    for (double L : sides_) {
        if (!(L > 0.0) || !std::isfinite(L)) throw std::domain_error("torus sides must be positive");
        volume_ *= L;
    }
}

FlatTorus FlatTorus::rectangle(double a) {
    if (!(a > 0.0)) throw std::domain_error("rectangle needs a > 0");
    return FlatTorus({a, 1.0 / a});
}

double FlatTorus::shortest_side() const { return *std::min_element(sides_.begin(), sides_.end()); }
double FlatTorus::longest_side() const { return *std::max_element(sides_.begin(), sides_.end()); }

double FlatTorus::ewald_time() const { return shortest_side() * longest_side() / (4.0 * kPi); }

std::vector<double> FlatTorus::minimal_image(std::span<const double> x) const {
    if (x.size() != sides_.size()) throw std::invalid_argument("point dimension mismatch");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double L = sides_[i];
        out[i] = x[i] - L * std::floor(x[i] / L + 0.5);
    }
    return out;
}

double heat_kernel_diag(const FlatTorus& torus, double t) {
    if (!(t > 0.0)) throw std::domain_error("heat kernel needs t > 0");
    const auto s = spectral_tails(torus, t);
    return (1.0 + product_minus_one(s)) / torus.volume();
}

double heat_kernel_diag_images(const FlatTorus& torus, double t) {
    if (!(t > 0.0)) throw std::domain_error("heat kernel needs t > 0");
    const auto s = image_tails(torus, t);
    return (1.0 + product_minus_one(s)) * std::pow(4.0 * kPi * t, -0.5 * torus.dimension());
}

double HeatDiagnostics::relative_gap() const {
    return std::abs(k_spectral - k_images) / std::max(std::abs(k_spectral), std::abs(k_images));
}

HeatDiagnostics heat_diagnostics(const FlatTorus& torus, double t) {
    return {t, heat_kernel_diag(torus, t), heat_kernel_diag_images(torus, t)};
}

double green(const FlatTorus& torus, std::span<const double> x) {
    const auto y = torus.minimal_image(x);
    double r2 = 0.0;
    for (double v : y) r2 += v * v;
    if (r2 == 0.0) throw std::domain_error("Green's function is singular at lattice points");

    const double tau = torus.ewald_time();
    const double r2_max = 4.0 * tau * kCutoffExponent;
    const double k2_max = kCutoffExponent / tau;
    const int n = torus.dimension();

    double real = 0.0;
    if (n == 2) {
        real = real_sum(torus, y, r2_max, false,
                        [&](double s) { return e1(s / (4.0 * tau)) / (4.0 * kPi); });
    } else {
        real = real_sum(torus, y, r2_max, false, [&](double s) {
            const double r = std::sqrt(s);
            return boost::math::erfc(r / (2.0 * std::sqrt(tau))) / (4.0 * kPi * r);
        });
    }
    const double dual = dual_sum(torus, y, k2_max, [&](double k2) { return std::exp(-k2 * tau) / k2; });
    return real + dual - tau / torus.volume();
}

double robin_via_green_limit(const FlatTorus& torus) {
    const int n = torus.dimension();
    // direction with irrational slopes
    std::vector<double> dir = {1.0, std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0};
    dir.resize(n);
    double norm = 0.0;
    for (double v : dir) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : dir) v /= norm;

    auto regular_part = [&](double h) {
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i) x[i] = h * dir[i];
        const double g = green(torus, x);
        return n == 2 ? g + std::log(h) / (2.0 * kPi) : g - 1.0 / (4.0 * kPi * h);
    };

    // regular_part(h) = R + c1 h^2 + c2 h^4 + ...
    constexpr int levels = 6;
    std::array<std::array<double, levels>, levels> table{};
    double h = 0.08 * torus.shortest_side();
    for (int i = 0; i < levels; ++i, h /= 2.0) {
        table[i][0] = regular_part(h);
        double factor = 1.0;
        for (int j = 1; j <= i; ++j) {
            factor *= 4.0;
            table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
        }
    }
    return table[levels - 1][levels - 1];
}

double robin_via_time_integral(const FlatTorus& torus, const TimeIntegralOptions& options) {
    using boost::math::quadrature::gauss_kronrod;
    const int n = torus.dimension();
    const double inv_volume = 1.0 / torus.volume();

    // t in (0, 1]: K - 1/V - (4 pi t)^{-n/2} through the image sum.
    auto short_time = [&](double t) {
        if (t <= 0.0) return -inv_volume;
        const auto s = image_tails(torus, t);
        return std::pow(4.0 * kPi * t, -0.5 * n) * product_minus_one(s) - inv_volume;
    };
    // t in [1, inf): K - 1/V through the eigenvalue sum.
    auto long_time = [&](double t) {
        const auto s = spectral_tails(torus, t);
        return inv_volume * product_minus_one(s);
    };
    double err = 0.0;
    const double near = gauss_kronrod<double, 31>::integrate(short_time, 0.0, 1.0, 15, 1e-13, &err);
    const double far = gauss_kronrod<double, 31>::integrate(
        long_time, 1.0, std::numeric_limits<double>::infinity(), 15, 1e-13, &err);

    // int_eps^1 of the subtracted singular term, minus the counterterm, as eps -> 0.
    double constant = 0.0;
    if (n == 2) {
        constant = options.include_log_shift ? (std::log(4.0) - kEulerGamma) / (4.0 * kPi) : 0.0;
    } else {
        constant = -2.0 * std::pow(4.0 * kPi, -1.5);
    }
    return near + far + constant;
}

double upper_incomplete_gamma(double a, double x) {
    if (!(x > 0.0)) throw std::domain_error("upper incomplete gamma needs x > 0");
    if (a > 0.0) return boost::math::tgamma(a, x);
    if (a == 0.0) return e1(x);
    // Gamma(a, x) = (Gamma(a + 1, x) - x^a e^{-x}) / a
    return (upper_incomplete_gamma(a + 1.0, x) - std::pow(x, a) * std::exp(-x)) / a;
}

double epstein_zeta(const FlatTorus& torus, double s) {
    const int n = torus.dimension();
    const double half_n = 0.5 * n;
    if (s == half_n || s <= 0.0 || (n % 2 == 0 && s == 1.0))
        throw std::domain_error("epstein_zeta: s = " + format_double(s) + " is a pole or unsupported");
    const double tau = torus.ewald_time();
    const double prefactor = std::pow(4.0 * kPi, -half_n);
    const std::vector<double> origin;

    const double dual = dual_sum(torus, origin, kCutoffExponent / tau, [&](double k2) {
        return std::pow(k2, -s) * upper_incomplete_gamma(s, k2 * tau);
    });
    const double real = real_sum(torus, origin, 4.0 * tau * kCutoffExponent, true, [&](double r2) {
        return std::pow(r2 / 4.0, s - half_n) * upper_incomplete_gamma(half_n - s, r2 / (4.0 * tau));
    });
    const double bracket = dual + prefactor * real + prefactor * std::pow(tau, s - half_n) / (s - half_n) -
                           std::pow(tau, s) / (s * torus.volume());
    return bracket / boost::math::tgamma(s);
}

double zeta_regular_value_at_one(const FlatTorus& torus) {
    if (torus.dimension() % 2 == 1) return epstein_zeta(torus, 1.0);
    const double tau = torus.ewald_time();
    const std::vector<double> origin;
    const double dual =
        dual_sum(torus, origin, kCutoffExponent / tau, [&](double k2) { return std::exp(-k2 * tau) / k2; });
    const double real = real_sum(torus, origin, 4.0 * tau * kCutoffExponent, true,
                                 [&](double r2) { return e1(r2 / (4.0 * tau)); });
    // Expanding 1/Gamma(s) and tau^{s-1}/(s-1) about s = 1.
    return dual + real / (4.0 * kPi) + std::log(tau) / (4.0 * kPi) - tau / torus.volume() +
           kEulerGamma / (4.0 * kPi);
}

double robin_via_zeta(const FlatTorus& torus) {
    const double regular = zeta_regular_value_at_one(torus);
    if (torus.dimension() % 2 == 1) return regular;
    return regular + (std::log(4.0) - 2.0 * kEulerGamma) / (4.0 * kPi);
}

}  // namespace drainage
