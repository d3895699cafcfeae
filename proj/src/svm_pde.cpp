#include "drainage/svm_pde.hpp"

#include "drainage/common.hpp"
#include "drainage/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace drainage {

namespace {

double dot(std::span<const double> u, std::span<const double> v) {
    std::vector<double> terms(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) terms[i] = u[i] * v[i];
    return pairwise_sum(terms);
}

double norm2(std::span<const double> u) { return std::sqrt(dot(u, u)); }

double max_abs(std::span<const double> u) {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
}

// Workspace for one solve: FFT plans and the frequency-space multipliers.
class Operators {
public:
    Operators(double a, std::size_t nx, std::size_t ny)
        : fft_(nx, ny, a, 1.0 / a), laplace_(fft_.modes()), precond_(fft_.modes()), work_(nx * ny) {
        const auto k2 = fft_.k_squared();
        for (std::size_t k = 0; k < k2.size(); ++k) laplace_[k] = -k2[k];
    }

    void laplacian(std::span<const double> in, std::span<double> out) { fft_.apply(in, out, laplace_); }

    void residual(std::span<const double> f, std::span<double> r) {
        laplacian(f, r);
        for (std::size_t i = 0; i < f.size(); ++i) r[i] += kEightPi * std::expm1(f[i]);
    }

    // Jacobian Delta + 8 pi e^f about the current state.
    void set_state(std::span<const double> f) {
        weight_.resize(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) weight_[i] = kEightPi * std::exp(f[i]);
        const double shift = pairwise_sum(weight_) / static_cast<double>(f.size());
        const auto k2 = fft_.k_squared();
        for (std::size_t k = 0; k < k2.size(); ++k) {
            double d = shift - k2[k];
            if (std::abs(d) < 1.0) d = d < 0.0 ? -1.0 : 1.0;
            precond_[k] = 1.0 / d;
        }
    }

    void jacobian(std::span<const double> v, std::span<double> out) {
        laplacian(v, out);
        for (std::size_t i = 0; i < v.size(); ++i) out[i] += weight_[i] * v[i];
    }

    void precondition(std::span<const double> in, std::span<double> out) { fft_.apply(in, out, precond_); }

private:
    spectral::Fourier2d fft_;
    std::vector<double> laplace_, precond_, weight_, work_;
};

// Restarted GMRES with right preconditioning for J x = b from x = 0.
int gmres(Operators& ops, std::span<const double> b, std::span<double> x, double rel_tol, int restart,
          int max_iterations) {
    const std::size_t n = b.size();
    std::fill(x.begin(), x.end(), 0.0);
    const double b_norm = norm2(b);
    if (b_norm == 0.0) return 0;
    const double target = rel_tol * b_norm;

    std::vector<std::vector<double>> basis(restart + 1, std::vector<double>(n));
    std::vector<std::vector<double>> h(restart + 1, std::vector<double>(restart, 0.0));
    std::vector<double> cs(restart), sn(restart), g(restart + 1);
    std::vector<double> r(n), w(n), z(n);

    int total = 0;
    while (total < max_iterations) {
        ops.jacobian(x, r);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
        double beta = norm2(r);
        if (beta <= target) return total;
        for (std::size_t i = 0; i < n; ++i) basis[0][i] = r[i] / beta;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;

        int k = 0;
        for (; k < restart && total < max_iterations; ++k, ++total) {
            ops.precondition(basis[k], z);
            ops.jacobian(z, w);
            for (int j = 0; j <= k; ++j) {
                h[j][k] = dot(w, basis[j]);
                for (std::size_t i = 0; i < n; ++i) w[i] -= h[j][k] * basis[j][i];
            }
            h[k + 1][k] = norm2(w);
            if (h[k + 1][k] > 0.0)
                for (std::size_t i = 0; i < n; ++i) basis[k + 1][i] = w[i] / h[k + 1][k];
            for (int j = 0; j < k; ++j) {
                const double t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
                h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
                h[j][k] = t;
            }
            const double rho = std::hypot(h[k][k], h[k + 1][k]);
            cs[k] = h[k][k] / rho;
            sn[k] = h[k + 1][k] / rho;
            h[k][k] = rho;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];
            if (std::abs(g[k + 1]) <= target || h[k][k] == 0.0) {
                ++k;
                ++total;
                break;
            }
        }
        // back substitution, then x += M^{-1} V y
        std::vector<double> y(k);
        for (int j = k - 1; j >= 0; --j) {
            double s = g[j];
            for (int l = j + 1; l < k; ++l) s -= h[j][l] * y[l];
            y[j] = s / h[j][j];
        }
        std::fill(w.begin(), w.end(), 0.0);
        for (int j = 0; j < k; ++j)
            for (std::size_t i = 0; i < n; ++i) w[i] += y[j] * basis[j][i];
        ops.precondition(w, z);
        for (std::size_t i = 0; i < n; ++i) x[i] += z[i];
        if (std::abs(g[k]) <= target) return total;
    }
    return total;
}

// 1 + 1/<f, f> with <.,.> the grid mean
double deflation_factor(std::span<const double> f) {
    const double q = dot(f, f) / static_cast<double>(f.size());
    return q > 0.0 ? 1.0 + 1.0 / q : std::numeric_limits<double>::infinity();
}

std::string trace_text(const std::vector<NewtonStep>& trace) {
    std::ostringstream out;
    for (const auto& s : trace)
        out << "\n  " << s.iteration << ' ' << format_double(s.residual) << ' ' << format_double(s.damping) << ' '
            << s.krylov_iterations;
    return out.str();
}

}  // namespace

PeriodicField::PeriodicField(double a_, std::size_t nx_, std::size_t ny_) : a(a_), nx(nx_), ny(ny_) {
    if (!(a > 0.0) || !std::isfinite(a)) throw std::domain_error("field needs a > 0");
    if (nx < 16 || ny < 16 || nx % 2 != 0 || ny % 2 != 0)
        throw std::domain_error("grid sizes must be even and >= 16");
    values.assign(nx * ny, 0.0);
}

double PeriodicField::max_abs() const { return drainage::max_abs(values); }

double PeriodicField::volume() const {
    std::vector<double> e(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) e[i] = std::exp(values[i]);
    return pairwise_sum(e) / static_cast<double>(values.size());
}

PeriodicField cosine_seed(double a, std::size_t nx, std::size_t ny, double amplitude) {
    PeriodicField field(a, nx, ny);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) field(i, j) = -amplitude * std::cos(2.0 * kPi * field.x(i) / a);
    return field;
}

PeriodicField lift_orbit(const Orbit& orbit, std::size_t nx, std::size_t ny) {
    if (orbit.size() == 0) throw std::domain_error("empty orbit");
    PeriodicField field(orbit.a, nx, ny);
    const auto column = spectral::resample(orbit.f, nx);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) field(i, j) = column[i];
    return field;
}

PeriodicField laplacian(const PeriodicField& field) {
    Operators ops(field.a, field.nx, field.ny);
    PeriodicField out = field;
    ops.laplacian(field.values, out.values);
    return out;
}

PeriodicField residual(const PeriodicField& field) {
    Operators ops(field.a, field.nx, field.ny);
    PeriodicField out = field;
    ops.residual(field.values, out.values);
    return out;
}

bool SolveResult::trivial() const { return field.max_abs() < 1e-6; }

SolveResult solve(const PeriodicField& init, const SolveOptions& options) {
    if (init.values.size() != init.nx * init.ny || init.nx < 16 || init.ny < 16)
        throw std::domain_error("solve: malformed initial field");
    const std::size_t n = init.values.size();
    Operators ops(init.a, init.nx, init.ny);

    SolveResult result;
    result.field = init;
    auto& f = result.field.values;
    std::vector<double> r(n), step(n), trial(n), r_trial(n);

    auto merit = [&](std::span<const double> state, std::span<const double> res) {
        const double m = options.deflate_trivial ? deflation_factor(state) : 1.0;
        return m * norm2(res);
    };

    ops.residual(f, r);
    for (int it = 0;; ++it) {
        const double res_max = max_abs(r);
        if (!std::isfinite(res_max))
            throw NumericalError("svm solve: residual is not finite" + trace_text(result.trace));
        if (res_max <= options.tolerance) {
            result.residual = res_max;
            result.trace.push_back({it, res_max, 0.0, 0});
            return result;
        }
        if (it >= options.max_iterations)
            throw NumericalError("svm solve: no convergence after " + std::to_string(it) +
                                 " Newton steps (iteration residual damping krylov):" + trace_text(result.trace));

        ops.set_state(f);
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = -r[i];
        const double eta = std::clamp(0.1 * norm2(r) / std::sqrt(double(n)), 1e-14, 1e-6);
        const int krylov = gmres(ops, rhs, step, eta, options.krylov_restart, options.krylov_max_iterations);

        if (options.deflate_trivial) {
            // Newton step for (1 + 1/q) r, q = <f, f>, by Sherman-Morrison
            const double q = dot(f, f) / static_cast<double>(n);
            const double m = 1.0 + 1.0 / q;
            const double grad_dot_step = -2.0 * dot(f, step) / static_cast<double>(n) / (q * q);
            const double denom = 1.0 - grad_dot_step / m;
            if (std::abs(denom) > 1e-12)
                for (double& v : step) v /= denom;
        }

        const double current = merit(f, r);
        double damping = 1.0;
        for (int halvings = 0;; ++halvings) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = f[i] + damping * step[i];
            ops.residual(trial, r_trial);
            const double m = merit(trial, r_trial);
            if ((std::isfinite(m) && m < current) || halvings >= 12) break;
            damping *= 0.5;
        }
        result.trace.push_back({it, res_max, damping, krylov});
        f.swap(trial);
        r.swap(r_trial);
    }
}

void write_solver_log(std::ostream& out, const SolveResult& result) {
    for (const auto& s : result.trace)
        out << s.iteration << ' ' << format_double(s.residual) << ' ' << format_double(s.damping) << ' '
            << s.krylov_iterations << '\n';
}

void write_field_csv(std::ostream& out, const PeriodicField& field) {
    out << "i,j,x,y,f\n";
    for (std::size_t i = 0; i < field.nx; ++i)
        for (std::size_t j = 0; j < field.ny; ++j)
            out << i << ',' << j << ',' << format_double(field.x(i)) << ',' << format_double(field.y(j)) << ','
                << format_double(field(i, j)) << '\n';
}

std::vector<BranchPoint> bifurcation_scan(std::span<const double> a_grid, const ScanOptions& options) {
    std::vector<double> grid(a_grid.begin(), a_grid.end());
    std::sort(grid.begin(), grid.end());
    std::vector<BranchPoint> out(grid.size());
    parallel_for(grid.size(), thread_count(options.threads), [&](std::size_t k) {
        BranchPoint& bp = out[k];
        bp.a = grid[k];
        const PeriodicField seed = cosine_seed(grid[k], options.nx, options.ny, options.seed_amplitude);
        SolveResult found;
        bool have = false;
        for (bool deflate : {false, true}) {
            SolveOptions opts;
            opts.deflate_trivial = deflate;
            opts.max_iterations = 80;
            try {
                found = solve(seed, opts);
                have = true;
                if (!found.trivial()) break;
            } catch (const NumericalError&) {
            }
        }
        if (!have) return;
        const auto& fld = found.field;
        bp.nontrivial = !found.trivial();
        bp.residual = found.residual;
        bp.iterations = static_cast<int>(found.trace.size());
        const auto [lo, hi] = std::minmax_element(fld.values.begin(), fld.values.end());
        bp.amplitude = *hi - *lo;
        for (std::size_t i = 0; i < fld.nx; ++i) {
            double ymin = fld(i, 0), ymax = fld(i, 0);
            for (std::size_t j = 1; j < fld.ny; ++j) {
                ymin = std::min(ymin, fld(i, j));
                ymax = std::max(ymax, fld(i, j));
            }
            bp.y_variation = std::max(bp.y_variation, ymax - ymin);
        }
    });
    return out;
}

double first_nontrivial(std::span<const BranchPoint> scan) {
    for (const auto& bp : scan)
        if (bp.nontrivial) return bp.a;
    return std::numeric_limits<double>::quiet_NaN();
}

double linearized_eigenvalue(double a, int m, int n) {
    if (!(a > 0.0)) throw std::domain_error("linearized_eigenvalue needs a > 0");
    const double kx = 2.0 * kPi * m / a;
    const double ky = 2.0 * kPi * n * a;
    return kEightPi - kx * kx - ky * ky;
}

CriticalMode critical_mode(double a) {
    CriticalMode best{linearized_eigenvalue(a, 0, 0), 0, 0};
    // 8 pi - |k|^2 only approaches zero for |k|^2 near 8 pi
    const int m_max = static_cast<int>(std::ceil(2.0 * a)) + 1;
    const int n_max = static_cast<int>(std::ceil(2.0 / a)) + 1;
    for (int m = 0; m <= m_max; ++m)
        for (int n = 0; n <= n_max; ++n) {
            const double lambda = linearized_eigenvalue(a, m, n);
            if (std::abs(lambda) < std::abs(best.eigenvalue)) best = {lambda, m, n};
        }
    return best;
}

}  // namespace drainage
