#pragma once

// Test-only reference computations, independent of the library code paths
// they are compared against.

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <numbers>

namespace oracle {

inline constexpr double kEightPi = 8.0 * std::numbers::pi;

/// Root of e^f - f - 1 = c on [lo, hi] by plain bisection.
inline double bisect_potential(double c, double lo, double hi) {
    auto g = [c](double f) { return std::exp(f) - f - 1.0 - c; };
    const bool rising = g(hi) > 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((g(mid) > 0.0) == rising) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// Period of f'' = 8 pi (1 - e^f) by shooting: integrate from (f_min, 0)
/// with an adaptive Dormand-Prince method until f' first returns to zero
/// (at f_max), then double the elapsed time.
inline double shooting_period(double energy) {
    using State = std::array<double, 2>;
    namespace ode = boost::numeric::odeint;
    const double f_min = bisect_potential(energy / kEightPi, -(energy / kEightPi + 2.0), 0.0);
    auto rhs = [](const State& s, State& d, double) {
        d[0] = s[1];
        d[1] = kEightPi * (1.0 - std::exp(s[0]));
    };
    auto stepper = ode::make_dense_output(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
    stepper.initialize(State{f_min, 0.0}, 0.0, 1e-4);
    bool moved = false;
    for (int guard = 0; guard < 10000000; ++guard) {
        const auto [t0, t1] = stepper.do_step(rhs);
        State s1;
        stepper.calc_state(t1, s1);
        if (!moved) {
            moved = s1[1] > 0.0;
            continue;
        }
        if (s1[1] <= 0.0) {
            double lo = t0, hi = t1;
            for (int i = 0; i < 200; ++i) {
                const double mid = 0.5 * (lo + hi);
                State sm;
                stepper.calc_state(mid, sm);
                if (sm[1] > 0.0) lo = mid; else hi = mid;
            }
            return 2.0 * 0.5 * (lo + hi);
        }
    }
    return std::nan("");
}

}  // namespace oracle
