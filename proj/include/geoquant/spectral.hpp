#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "geoquant/grid.hpp"

namespace geoquant {

using cplx = std::complex<double>;

/// In-place 1-D complex DFT of fixed length backed by FFTW.
/// forward: X_k = sum_n x_n e^{-2 pi i k n / N}; inverse is unnormalized.
class Fft {
public:
    explicit Fft(std::size_t n);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;
    Fft(Fft&&) noexcept;
    Fft& operator=(Fft&&) noexcept;

    std::size_t size() const { return n_; }
    void forward(std::span<cplx> data);
    void inverse(std::span<cplx> data);

private:
    std::size_t n_ = 0;
    cplx* buffer_ = nullptr;
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

/// Angular wavenumbers 2 pi k / period in FFT order. The Nyquist entry (k = n/2) is
/// reported as +pi n / period; callers decide how to treat it.
std::vector<double> wavenumbers(const Axis& axis);

/// Apply `fn(line)` to every 1-D line of `values` along axis `a` of `grid`.
template <typename T, typename Fn>
void for_each_line(const PhaseGrid& grid, std::size_t a, std::span<T> values, Fn&& fn) {
    const std::size_t n = grid.axis(a).count;
    const std::size_t s = grid.stride(a);
    const std::size_t block = s * n;
    std::vector<T> line(n);
    for (std::size_t outer = 0; outer < grid.size(); outer += block) {
        for (std::size_t inner = 0; inner < s; ++inner) {
            const std::size_t base = outer + inner;
            for (std::size_t i = 0; i < n; ++i) line[i] = values[base + i * s];
            fn(std::span<T>(line));
            for (std::size_t i = 0; i < n; ++i) values[base + i * s] = line[i];
        }
    }
}

/// Spectral first derivative along axis `a` (treats the axis as periodic).
std::vector<cplx> spectral_derivative(const PhaseGrid& grid, std::span<const cplx> values, std::size_t a);

/// First derivative of real samples along axis `a`: spectral on periodic grids,
/// 4th-order centered differences otherwise (4th-order one-sided in the two boundary layers).
std::vector<double> sampled_derivative(const PhaseGrid& grid, std::span<const double> values, std::size_t a);

/// 4th-order finite-difference derivative of uniformly spaced samples (one-sided near ends).
std::vector<double> fd4_derivative(std::span<const double> values, double spacing);

/// Band-limited (trigonometric) interpolant of complex samples on a periodic grid.
/// Exact for band-limited data; evaluation costs O(grid.size()) per point.
class TrigInterpolant {
public:
    TrigInterpolant(const PhaseGrid& grid, std::span<const cplx> values);
    cplx operator()(std::span<const double> point) const;

private:
    PhaseGrid grid_;
    std::vector<cplx> coeffs_;
    std::vector<std::vector<double>> kappa_;
};

/// Periodic bicubic B-spline interpolant on a rank-2 grid. Exact at nodes, O(h^4) between.
class PeriodicBicubic {
public:
    PeriodicBicubic(const PhaseGrid& grid, std::span<const double> values);
    double operator()(double x, double y) const;

private:
    Axis ax_, ay_;
    std::vector<double> coeffs_;
};

}  // namespace geoquant
