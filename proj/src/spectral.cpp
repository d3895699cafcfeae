#include "drainage/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace drainage::spectral {

namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

double wavenumber(std::size_t k, std::size_t n, double length) {
    const double index = k <= n / 2 ? static_cast<double>(k) : static_cast<double>(k) - n;
    return 2.0 * std::numbers::pi * index / length;
}

}  // namespace

std::vector<std::complex<double>> forward(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<double> in(values.begin(), values.end());
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                    reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

std::vector<double> inverse(std::span<const std::complex<double>> modes, std::size_t n) {
    std::vector<std::complex<double>> in(modes.begin(), modes.end());
    std::vector<double> out(n);
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                    out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    for (double& v : out) v /= static_cast<double>(n);
    return out;
}

std::vector<double> derivative(std::span<const double> values, double length) {
    const std::size_t n = values.size();
    auto modes = forward(values);
    for (std::size_t k = 0; k < modes.size(); ++k) {
        if (n % 2 == 0 && k == n / 2) {
            modes[k] = 0.0;
            continue;
        }
        modes[k] *= std::complex<double>(0.0, wavenumber(k, n, length));
    }
    return inverse(modes, n);
}

std::vector<double> antiderivative(std::span<const double> values, double length) {
    const std::size_t n = values.size();
    auto modes = forward(values);
    modes[0] = 0.0;
    for (std::size_t k = 1; k < modes.size(); ++k) {
        if (n % 2 == 0 && k == n / 2) {
            modes[k] = 0.0;
            continue;
        }
        modes[k] /= std::complex<double>(0.0, wavenumber(k, n, length));
    }
    auto out = inverse(modes, n);
    const double offset = out[0];
    for (double& v : out) v -= offset;
    return out;
}

std::vector<double> resample(std::span<const double> values, std::size_t n_out) {
    const std::size_t n = values.size();
    if (n_out < n) {
        if (n % n_out != 0) throw std::invalid_argument("resample: downsampling needs n % n_out == 0");
        std::vector<double> out(n_out);
        for (std::size_t i = 0; i < n_out; ++i) out[i] = values[i * (n / n_out)];
        return out;
    }
    const auto modes = forward(values);
    std::vector<std::complex<double>> padded(n_out / 2 + 1, 0.0);
    for (std::size_t k = 0; k < modes.size(); ++k) {
        // The input Nyquist mode stands for both +k and -k once it is no
        // longer the Nyquist mode of the output.
        const bool split = n % 2 == 0 && k == n / 2 && n_out != n;
        padded[k] = split ? 0.5 * modes[k] : modes[k];
    }
    auto out = inverse(padded, n_out);
    const double scale = static_cast<double>(n_out) / static_cast<double>(n);
    for (double& v : out) v *= scale;
    return out;
}

double interpolate(std::span<const double> values, double length, double x) {
    const std::size_t n = values.size();
    const auto modes = forward(values);
    double sum = modes[0].real();
    for (std::size_t k = 1; k < modes.size(); ++k) {
        const double w = 2.0 * std::numbers::pi * static_cast<double>(k) * x / length;
        const double weight = (n % 2 == 0 && k == n / 2) ? 1.0 : 2.0;
        sum += weight * (modes[k].real() * std::cos(w) - modes[k].imag() * std::sin(w));
    }
    return sum / static_cast<double>(n);
}

Fourier2d::Fourier2d(std::size_t nx, std::size_t ny, double lx, double ly)
    : nx_(nx), ny_(ny), real_(nx * ny), spectrum_(nx * (ny / 2 + 1)) {
    if (nx < 2 || ny < 2) throw std::invalid_argument("Fourier2d needs at least 2 points per axis");
    const std::size_t half = ny / 2 + 1;
    k_squared_.resize(nx * half);
    for (std::size_t i = 0; i < nx; ++i) {
        const double kx = wavenumber(i, nx, lx);
        for (std::size_t j = 0; j < half; ++j) {
            const double ky = wavenumber(j, ny, ly);
            k_squared_[i * half + j] = kx * kx + ky * ky;
        }
    }
    std::lock_guard lock(planner_mutex());
    forward_plan_ = fftw_plan_dft_r2c_2d(static_cast<int>(nx), static_cast<int>(ny), real_.data(),
                                         reinterpret_cast<fftw_complex*>(spectrum_.data()), FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_c2r_2d(static_cast<int>(nx), static_cast<int>(ny),
                                         reinterpret_cast<fftw_complex*>(spectrum_.data()), real_.data(),
                                         FFTW_ESTIMATE);
}

Fourier2d::~Fourier2d() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void Fourier2d::apply(std::span<const double> in, std::span<double> out, std::span<const double> multiplier) {
    if (in.size() != real_.size() || out.size() != real_.size() || multiplier.size() != spectrum_.size())
        throw std::invalid_argument("Fourier2d::apply size mismatch");
    std::copy(in.begin(), in.end(), real_.begin());
    fftw_execute(static_cast<fftw_plan>(forward_plan_));
    const double scale = 1.0 / static_cast<double>(real_.size());
    for (std::size_t k = 0; k < spectrum_.size(); ++k) spectrum_[k] *= multiplier[k] * scale;
    fftw_execute(static_cast<fftw_plan>(inverse_plan_));
    std::copy(real_.begin(), real_.end(), out.begin());
}

}  // namespace drainage::spectral
