#pragma once

// Trigonometric (FFT) operations on uniformly sampled periodic data.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace drainage::spectral {

std::vector<std::complex<double>> forward(std::span<const double> values);
std::vector<double> inverse(std::span<const std::complex<double>> modes, std::size_t n);

/// d/dx of the trigonometric interpolant of samples on [0, length).
std::vector<double> derivative(std::span<const double> values, double length);

/// Periodic antiderivative of (values - mean), normalized so that entry 0 is 0.
std::vector<double> antiderivative(std::span<const double> values, double length);

/// Trigonometric interpolant resampled onto n_out uniform points.
std::vector<double> resample(std::span<const double> values, std::size_t n_out);

/// Trigonometric interpolant evaluated at an arbitrary point.
double interpolate(std::span<const double> values, double length, double x);

/// Fourier multipliers on an nx-by-ny periodic grid over [0, lx) x [0, ly),
/// stored row-major with x the slow index. Plans are built once; apply() may be
/// called repeatedly but not concurrently on the same object.
class Fourier2d {
public:
    Fourier2d(std::size_t nx, std::size_t ny, double lx, double ly);
    ~Fourier2d();
    Fourier2d(const Fourier2d&) = delete;
    Fourier2d& operator=(const Fourier2d&) = delete;

    std::size_t modes() const { return k_squared_.size(); }
    /// |k|^2 for every stored half-spectrum mode.
    std::span<const double> k_squared() const { return k_squared_; }
    /// out = inverse(multiplier * forward(in)); in and out may alias.
    void apply(std::span<const double> in, std::span<double> out, std::span<const double> multiplier);

private:
    std::size_t nx_, ny_;
    std::vector<double> k_squared_;
    std::vector<double> real_;
    std::vector<std::complex<double>> spectrum_;
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

}  // namespace drainage::spectral
