#include "geoquant/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <utility>

#include "geoquant/error.hpp"

namespace geoquant {

Fft::Fft(std::size_t n) : n_(n) {
    if (n == 0) throw ValidationError("FFT length must be positive");
    buffer_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * n));
    auto* buf = reinterpret_cast<fftw_complex*>(buffer_);
    // FFTW_ESTIMATE keeps plans independent of timing, so results are reproducible run to run.
    forward_plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() {
    if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
    if (buffer_) fftw_free(buffer_);
}

Fft::Fft(Fft&& o) noexcept
    : n_(std::exchange(o.n_, 0)),
      buffer_(std::exchange(o.buffer_, nullptr)),
      forward_plan_(std::exchange(o.forward_plan_, nullptr)),
      inverse_plan_(std::exchange(o.inverse_plan_, nullptr)) {}

Fft& Fft::operator=(Fft&& o) noexcept {
    std::swap(n_, o.n_);
    std::swap(buffer_, o.buffer_);
    std::swap(forward_plan_, o.forward_plan_);
    std::swap(inverse_plan_, o.inverse_plan_);
    return *this;
}

void Fft::forward(std::span<cplx> data) {
    std::copy(data.begin(), data.end(), buffer_);
    fftw_execute(static_cast<fftw_plan>(forward_plan_));
    std::copy(buffer_, buffer_ + n_, data.begin());
}

void Fft::inverse(std::span<cplx> data) {
    std::copy(data.begin(), data.end(), buffer_);
    fftw_execute(static_cast<fftw_plan>(inverse_plan_));
    std::copy(buffer_, buffer_ + n_, data.begin());
}

std::vector<double> wavenumbers(const Axis& axis) {
    const std::size_t n = axis.count;
    std::vector<double> k(n);
    const double base = 2.0 * std::numbers::pi / axis.period();
    for (std::size_t i = 0; i < n; ++i) {
        const long m = i <= n / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
        k[i] = base * static_cast<double>(m);
    }
    return k;
}

std::vector<cplx> spectral_derivative(const PhaseGrid& grid, std::span<const cplx> values, std::size_t a) {
    if (values.size() != grid.size()) throw ShapeError("sample count does not match grid");
    std::vector<cplx> out(values.begin(), values.end());
    const Axis& ax = grid.axis(a);
    const std::size_t n = ax.count;
    auto k = wavenumbers(ax);
    if (n % 2 == 0) k[n / 2] = 0.0;  // odd derivative of the Nyquist mode is not representable
    Fft fft(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for_each_line(grid, a, std::span<cplx>(out), [&](std::span<cplx> line) {
        fft.forward(line);
        for (std::size_t i = 0; i < n; ++i) line[i] *= cplx(0.0, k[i] * inv_n);
        fft.inverse(line);
    });
    return out;
}

std::vector<double> fd4_derivative(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    if (n < 5) throw ValidationError("4th-order differences need at least 5 samples");
    std::vector<double> d(n);
    const double c = 1.0 / (12.0 * h);
    for (std::size_t i = 2; i + 2 < n; ++i) d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * c;
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * c;
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * c;
    d[n - 1] = -(-25.0 * f[n - 1] + 48.0 * f[n - 2] - 36.0 * f[n - 3] + 16.0 * f[n - 4] - 3.0 * f[n - 5]) * c;
    d[n - 2] = -(-3.0 * f[n - 1] - 10.0 * f[n - 2] + 18.0 * f[n - 3] - 6.0 * f[n - 4] + f[n - 5]) * c;
    return d;
}

std::vector<double> sampled_derivative(const PhaseGrid& grid, std::span<const double> values, std::size_t a) {
    if (values.size() != grid.size()) throw ShapeError("sample count does not match grid");
    if (grid.periodic()) {
        std::vector<cplx> c(values.begin(), values.end());
        auto d = spectral_derivative(grid, c, a);
        std::vector<double> out(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i].real();
        return out;
    }
    std::vector<double> out(values.begin(), values.end());
    const double h = grid.axis(a).spacing;
    for_each_line(grid, a, std::span<double>(out), [&](std::span<double> line) {
        auto d = fd4_derivative(line, h);
        std::copy(d.begin(), d.end(), line.begin());
    });
    return out;
}

TrigInterpolant::TrigInterpolant(const PhaseGrid& grid, std::span<const cplx> values)
    : grid_(grid), coeffs_(values.begin(), values.end()) {
    if (values.size() != grid.size()) throw ShapeError("sample count does not match grid");
    for (std::size_t a = 0; a < grid.rank(); ++a) {
        const std::size_t n = grid.axis(a).count;
        Fft fft(n);
        const double inv_n = 1.0 / static_cast<double>(n);
        for_each_line(grid, a, std::span<cplx>(coeffs_), [&](std::span<cplx> line) {
            fft.forward(line);
            for (auto& v : line) v *= inv_n;
        });
        kappa_.push_back(wavenumbers(grid.axis(a)));
    }
}

cplx TrigInterpolant::operator()(std::span<const double> point) const {
    // Contract the coefficient tensor one axis at a time, last axis first.
    std::vector<cplx> work = coeffs_;
    std::size_t len = work.size();
    std::vector<cplx> w;
    for (std::size_t a = grid_.rank(); a-- > 0;) {
        const Axis& ax = grid_.axis(a);
        const std::size_t n = ax.count;
        const double x = point[a] - ax.start;
        w.assign(n, cplx{});
        for (std::size_t k = 0; k < n; ++k) {
            const double arg = kappa_[a][k] * x;
            // Symmetric treatment of the Nyquist mode keeps real data real.
            w[k] = (n % 2 == 0 && k == n / 2) ? cplx(std::cos(arg), 0.0) : cplx(std::cos(arg), std::sin(arg));
        }
        const std::size_t outer = len / n;
        for (std::size_t o = 0; o < outer; ++o) {
            cplx s{};
            for (std::size_t k = 0; k < n; ++k) s += work[o * n + k] * w[k];
            work[o] = s;
        }
        len = outer;
    }
    return work[0];
}

PeriodicBicubic::PeriodicBicubic(const PhaseGrid& grid, std::span<const double> values)
    : ax_(grid.axis(0)), ay_(grid.axis(1)) {
    if (grid.rank() != 2) throw UnsupportedError("bicubic interpolation needs a rank-2 grid");
    if (values.size() != grid.size()) throw ShapeError("sample count does not match grid");
    // Prefilter: divide by the B-spline symbol (4 + 2 cos k)/6 along each axis.
    std::vector<cplx> c(values.begin(), values.end());
    for (std::size_t a = 0; a < 2; ++a) {
        const std::size_t n = grid.axis(a).count;
        Fft fft(n);
        std::vector<double> symbol(n);
        for (std::size_t k = 0; k < n; ++k)
            symbol[k] = (4.0 + 2.0 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n))) /
                        6.0 * static_cast<double>(n);
        for_each_line(grid, a, std::span<cplx>(c), [&](std::span<cplx> line) {
            fft.forward(line);
            for (std::size_t k = 0; k < n; ++k) line[k] /= symbol[k];
            fft.inverse(line);
        });
    }
    coeffs_.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) coeffs_[i] = c[i].real();
}

namespace {

void bspline_weights(double t, double w[4]) {
    const double t2 = t * t, t3 = t2 * t;
    const double u = 1.0 - t;
    w[0] = u * u * u / 6.0;
    w[1] = (3.0 * t3 - 6.0 * t2 + 4.0) / 6.0;
    w[2] = (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) / 6.0;
    w[3] = t3 / 6.0;
}

long wrap(long i, long n) {
    i %= n;
    return i < 0 ? i + n : i;
}

}  // namespace

double PeriodicBicubic::operator()(double x, double y) const {
    const double ux = (x - ax_.start) / ax_.spacing;
    const double uy = (y - ay_.start) / ay_.spacing;
    const double fx = std::floor(ux), fy = std::floor(uy);
    double wx[4], wy[4];
    bspline_weights(ux - fx, wx);
    bspline_weights(uy - fy, wy);
    const long nx = static_cast<long>(ax_.count), ny = static_cast<long>(ay_.count);
    const long ix = static_cast<long>(fx), iy = static_cast<long>(fy);
    double s = 0.0;
    for (int a = 0; a < 4; ++a) {
        const std::size_t row = static_cast<std::size_t>(wrap(ix - 1 + a, nx)) * static_cast<std::size_t>(ny);
        double r = 0.0;
        for (int b = 0; b < 4; ++b) r += wy[b] * coeffs_[row + static_cast<std::size_t>(wrap(iy - 1 + b, ny))];
        s += wx[a] * r;
    }
    return s;
}

}  // namespace geoquant
