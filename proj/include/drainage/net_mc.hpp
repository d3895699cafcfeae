#pragma once

// Monte Carlo narrow escape times on flat 2- and 3-tori and on Okikiolu tori.
//
// Far from the window a walker moves by walk-on-spheres, accumulating the
// expected exit time of each ball; inside a shell around the window it takes
// fixed Euler-Maruyama steps with a Brownian-bridge crossing test.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace drainage {

struct Manifold {
    enum class Kind { flat2, flat3, okikiolu };
    Kind kind = Kind::flat2;
    /// Coordinate box: (a, 1/a) for flat2 and okikiolu, (L1, L2, L3) for flat3.
    std::vector<double> sides;
    double a = 1.0;  ///< flat2 and okikiolu
    int oscillations = 1;  ///< okikiolu: oscillations of f per cell
    /// okikiolu: conformal factor e^h with h = scale f - log mean(e^{scale f});
    /// scale 1 is the steady vortex metric, anything else is a control.
    double scale = 1.0;

    int dimension() const { return kind == Kind::flat3 ? 3 : 2; }
    double volume() const;
    double shortest_side() const;
};

/// Parses "flat2:a=1", "flat3:L=1,1,1" (or "flat3:L=2" for a cube) and
/// "okikiolu:a=1.5[,k=1][,scale=1]". Throws std::invalid_argument.
Manifold parse_manifold(std::string_view text);
std::string describe(const Manifold& m);

struct NetConfig {
    Manifold manifold;
    std::vector<double> q;  ///< window center in coordinates
    double eps = 0.01;      ///< geodesic window radius
    double nu = 1.0;
    std::size_t walkers = 20000;
    double dt = 0.0;  ///< 0 selects eps^2 / (200 n nu)
    std::uint64_t seed = 42;
    std::size_t threads = 0;
    /// Starting point for every walker; empty means uniform on M minus the window.
    std::vector<double> start;
    /// Walkers still running after this many steps are censored.
    std::uint64_t max_steps = 50'000'000;
    /// Euler-Maruyama is used within shell_width * (Euclidean window radius)
    /// of the window.
    double shell_width = 1.0;
};

/// Effective time step (resolves dt = 0).
double time_step(const NetConfig& config);

/// Throws std::domain_error unless eps > 0, eps < shortest side / 10,
/// sqrt(2 n nu dt) <= eps / 10, nu > 0 and q has the manifold's dimension.
void validate(const NetConfig& config);

struct NetResult {
    double mean = 0.0;
    double stderr_ = 0.0;  ///< sample standard deviation / sqrt(completed walkers)
    std::size_t walkers = 0;
    std::size_t censored = 0;
    double absorbed_fraction = 0.0;
    double theory = 0.0;  ///< NaN when unavailable
    double z_score = 0.0;  ///< (mean - theory) / stderr, NaN when unavailable
    double dt = 0.0;
    double wall_seconds = 0.0;  ///< metadata; not part of the reproducible result
};

/// Mean-NET theory (V/nu)(-log eps/(2 pi) + R) in 2D, (V/nu)(1/(4 pi eps) + R)
/// in 3D. Throws std::domain_error for manifolds without a known Robin
/// constant (non-steady Okikiolu controls).
double theory_average(const NetConfig& config);

/// Sojourn time of one walker; NaN if censored.
double sample_sojourn(const NetConfig& config, std::uint64_t walker_id);

/// All walkers in parallel, reduced in a fixed order.
NetResult average_net(const NetConfig& config);

/// Per-walker sojourn times in walker order (NaN for censored walkers).
std::vector<double> sojourn_times(const NetConfig& config);

struct GreenCheck {
    std::vector<double> p1, p2;
    NetResult v1, v2;
    double difference = 0.0;  ///< v1.mean - v2.mean
    double combined_stderr = 0.0;
    double predicted = 0.0;  ///< -(V/nu)(G(p1, q) - G(p2, q))
    double z_score = 0.0;
    bool agrees = false;  ///< |difference - predicted| <= 3 combined SE
};

/// Fixed-start NETs from p1 and p2 against the Green's function prediction.
/// Flat manifolds only; walkers must be >= 100.
GreenCheck pointwise_green_check(const NetConfig& config, const std::vector<double>& p1,
                                 const std::vector<double>& p2);

struct DrainageWindow {
    std::vector<double> q;
    double f = 0.0;  ///< conformal exponent h(q)
    NetResult result;
};

struct DrainageComparison {
    std::size_t i = 0, j = 0;
    double difference = 0.0;
    double bound = 0.0;  ///< 3 combined SE + relative_allowance * mean of |means|
    bool agrees = false;
};

struct DrainageReport {
    std::vector<DrainageWindow> windows;
    std::vector<DrainageComparison> comparisons;
    bool all_agree() const;
};

/// Window centers at the maximum and the minimum of f on the Okikiolu torus.
std::vector<std::vector<double>> extremal_windows(const Manifold& m);

/// NET for a window at each q (all other settings from `base`), compared
/// pairwise. `base.manifold` must be an Okikiolu torus.
DrainageReport uniform_drainage_test(const NetConfig& base, const std::vector<std::vector<double>>& q_list,
                                     double relative_allowance = 0.05);

}  // namespace drainage
