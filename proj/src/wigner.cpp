#include "geoquant/wigner.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "geoquant/bws.hpp"
#include "geoquant/constants.hpp"
#include "geoquant/error.hpp"

namespace geoquant {

namespace {

constexpr double pi = std::numbers::pi;
constexpr cplx i_unit{0.0, 1.0};

PhaseGrid plane_of(const Axis& q, const Axis& p) { return PhaseGrid::plane(q, p, true); }

void check_p_axis(const Axis& q, const Axis& p, double sigma) {
    const std::size_t K = p.count;
    const double needed = 2.0 * pi * sigma / q.spacing;
    std::ostringstream req;
    req.precision(17);
    req << "required: " << K << " p nodes with spacing >= " << needed / static_cast<double>(K) << " starting at -"
        << needed / 2.0 << " (p = 0 at index " << K / 2 << ")";
    if (K < 2 || !is_power_of_two(K)) throw AliasingError("p axis needs a power-of-two node count; " + req.str());
    if (std::abs(p[K / 2]) > 1e-9 * p.spacing) throw AliasingError("p axis is not centered on p = 0; " + req.str());
    if (static_cast<double>(K) * p.spacing < needed * (1.0 - 1e-12))
        throw AliasingError("p range " + std::to_string(static_cast<double>(K) * p.spacing) +
                            " does not cover the band limit of psi; " + req.str());
}

// Fourier data rows ftilde(q_i, k_j), j = -K/2..K/2-1 stored at j + K/2, to f(q_i, p_l).
// The unpaired j = -K/2 term keeps only its real part (the average with its missing conjugate).
std::vector<double> rows_to_distribution(std::vector<cplx>& ft, std::size_t nq, std::size_t K, double dk,
                                         double* max_imag, double* max_abs) {
    Fft fft(K);
    std::vector<cplx> line(K);
    std::vector<double> out(nq * K);
    *max_imag = 0.0;
    *max_abs = 0.0;
    const long Kl = static_cast<long>(K);
    for (std::size_t i = 0; i < nq; ++i) {
        for (long j = -Kl / 2; j < Kl / 2; ++j) {
            cplx v = ft[i * K + static_cast<std::size_t>(j + Kl / 2)];
            if (j == -Kl / 2) v = v.real();
            line[static_cast<std::size_t>((j + Kl) % Kl)] = v;
        }
        fft.forward(line);
        for (long l = -Kl / 2; l < Kl / 2; ++l) {
            const cplx v = line[static_cast<std::size_t>((l + Kl) % Kl)] * (dk / (2.0 * pi));
            out[i * K + static_cast<std::size_t>(l + Kl / 2)] = v.real();
            *max_imag = std::max(*max_imag, std::abs(v.imag()));
            *max_abs = std::max(*max_abs, std::abs(v));
        }
    }
    return out;
}

// psi(q + s) at every node for band-limited periodic samples.
class Shifter {
public:
    Shifter(const Axis& q, const std::vector<cplx>& v) : n_(q.count), fft_(q.count), coeffs_(v), kappa_(wavenumbers(q)) {
        fft_.forward(coeffs_);
        for (auto& c : coeffs_) c /= static_cast<double>(n_);
    }

    std::vector<cplx> shifted(double s) {
        std::vector<cplx> out(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            const bool nyquist = 2 * k == n_;
            const cplx phase = nyquist ? cplx(std::cos(kappa_[k] * s)) : std::exp(i_unit * kappa_[k] * s);
            out[k] = coeffs_[k] * phase;
        }
        fft_.inverse(out);
        return out;
    }

private:
    std::size_t n_;
    Fft fft_;
    std::vector<cplx> coeffs_;
    std::vector<double> kappa_;
};

bool band_negligible(const PhaseDistribution& f, double rel) {
    double peak = 0.0;
    for (double v : f.values) peak = std::max(peak, std::abs(v));
    const std::size_t nq = f.grid.axis(0).count, np = f.grid.axis(1).count;
    for (std::size_t i = 0; i < nq; ++i)
        for (std::size_t j = 0; j < np; ++j) {
            const bool band = i < 2 || i + 2 >= nq || j < 2 || j + 2 >= np;
            if (band && std::abs(f.values[i * np + j]) > rel * peak) return false;
        }
    return true;
}

bool inside_window(const Axis& a, double x) { return x >= a.start && x < a.start + a.period(); }

double gauss(double x, double s) { return std::exp(-0.5 * x * x / (s * s)); }

}  // namespace

WaveFunction::WaveFunction(Axis q_axis, std::vector<cplx> v, double sigma_)
    : q(q_axis), values(std::move(v)), sigma(sigma_) {
    if (!is_power_of_two(q.count)) throw ValidationError("wave function grid needs a power-of-two node count");
    if (values.size() != q.count) throw ShapeError("wave function samples do not match the q axis");
    if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
}

double WaveFunction::norm_squared() const {
    double s = 0.0;
    for (const auto& v : values) s += std::norm(v);
    return s * q.spacing;
}

cplx WaveFunction::inner(const WaveFunction& other) const {
    if (!(q == other.q)) throw ShapeError("wave functions live on different grids");
    cplx s{};
    for (std::size_t i = 0; i < values.size(); ++i) s += std::conj(values[i]) * other.values[i];
    return s * q.spacing;
}

PhaseDistribution::PhaseDistribution(PhaseGrid g, std::vector<double> v, Provenance prov)
    : grid(std::move(g)), values(std::move(v)), provenance(prov) {
    if (grid.rank() != 2) throw UnsupportedError("phase distributions are implemented for d = 1");
    if (values.size() != grid.size()) throw ShapeError("distribution samples do not match grid");
    particle_number = integral();
}

double PhaseDistribution::integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * grid.cell_volume();
}

std::vector<double> PhaseDistribution::q_marginal() const {
    const std::size_t nq = grid.axis(0).count, np = grid.axis(1).count;
    std::vector<double> m(nq, 0.0);
    for (std::size_t i = 0; i < nq; ++i)
        for (std::size_t j = 0; j < np; ++j) m[i] += values[i * np + j] * grid.axis(1).spacing;
    return m;
}

std::vector<double> PhaseDistribution::p_marginal() const {
    const std::size_t nq = grid.axis(0).count, np = grid.axis(1).count;
    std::vector<double> m(np, 0.0);
    for (std::size_t i = 0; i < nq; ++i)
        for (std::size_t j = 0; j < np; ++j) m[j] += values[i * np + j] * grid.axis(0).spacing;
    return m;
}

Axis conjugate_p_axis(const Axis& q, double sigma, std::size_t count) {
    const double dp = 2.0 * pi * sigma / (q.spacing * static_cast<double>(count));
    return Axis::periodic(-0.5 * dp * static_cast<double>(count), 0.5 * dp * static_cast<double>(count), count);
}

PhaseDistribution wigner_transform(const WaveFunction& psi, const Axis& p) {
    check_p_axis(psi.q, p, psi.sigma);
    const std::size_t nq = psi.q.count, K = p.count;
    const double dk = 2.0 * pi / (static_cast<double>(K) * p.spacing);
    Shifter shift(psi.q, psi.values);
    std::vector<cplx> ft(nq * K);
    const long Kl = static_cast<long>(K);
    for (long j = -Kl / 2; j < Kl / 2; ++j) {
        const double s = 0.5 * psi.sigma * dk * static_cast<double>(j);
        const auto plus = shift.shifted(s), minus = shift.shifted(-s);
        for (std::size_t i = 0; i < nq; ++i) ft[i * K + static_cast<std::size_t>(j + Kl / 2)] = std::conj(minus[i]) * plus[i];
    }
    double max_imag = 0.0, max_abs = 0.0;
    auto values = rows_to_distribution(ft, nq, K, dk, &max_imag, &max_abs);
    if (max_imag > 1e-10 * std::max(1.0, max_abs)) throw NumericError("Wigner transform has an imaginary residue");
    return PhaseDistribution(plane_of(psi.q, p), std::move(values), Provenance::wigner);
}

PhaseDistribution action_distribution(const Axis& q, const std::vector<double>& n, const std::vector<double>& S,
                                      const Axis& p) {
    if (n.size() != q.count || S.size() != q.count) throw ShapeError("density and phase samples do not match the q axis");
    for (double v : n)
        if (v < 0.0) throw DomainError("density must be non-negative");
    if (!is_power_of_two(p.count) || std::abs(p[p.count / 2]) > 1e-9 * p.spacing)
        throw AliasingError("p axis needs a power-of-two node count with p = 0 at index " + std::to_string(p.count / 2));
    const auto dS = fd4_derivative(S, q.spacing);
    const std::size_t nq = q.count, K = p.count;
    const double dk = 2.0 * pi / (static_cast<double>(K) * p.spacing);
    std::vector<cplx> ft(nq * K);
    const long Kl = static_cast<long>(K);
    for (std::size_t i = 0; i < nq; ++i)
        for (long j = -Kl / 2; j < Kl / 2; ++j)
            ft[i * K + static_cast<std::size_t>(j + Kl / 2)] = n[i] * std::exp(i_unit * dk * static_cast<double>(j) * dS[i]);
    double max_imag = 0.0, max_abs = 0.0;
    auto values = rows_to_distribution(ft, nq, K, dk, &max_imag, &max_abs);
    return PhaseDistribution(plane_of(q, p), std::move(values), Provenance::action);
}

double overlap(const PhaseDistribution& f1, const PhaseDistribution& f2) {
    if (!(f1.grid == f2.grid)) throw ShapeError("distributions live on different grids");
    double s = 0.0;
    for (std::size_t i = 0; i < f1.values.size(); ++i) s += f1.values[i] * f2.values[i];
    return s * f1.grid.cell_volume();
}

double l1_distance(const PhaseDistribution& f1, const PhaseDistribution& f2) {
    if (!(f1.grid == f2.grid)) throw ShapeError("distributions live on different grids");
    double s = 0.0;
    for (std::size_t i = 0; i < f1.values.size(); ++i) s += std::abs(f1.values[i] - f2.values[i]);
    return s * f1.grid.cell_volume();
}

PhaseDistribution smeared(const PhaseDistribution& f, double cells) {
    if (!(cells > 0.0)) throw ValidationError("smearing width must be positive");
    std::vector<cplx> c(f.values.begin(), f.values.end());
    for (std::size_t a = 0; a < 2; ++a) {
        const std::size_t n = f.grid.axis(a).count;
        // periodic Gaussian kernel in cell units, normalized to unit sum
        std::vector<cplx> kernel(n);
        double total = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double d = static_cast<double>(std::min(k, n - k));
            kernel[k] = gauss(d, cells);
            total += kernel[k].real();
        }
        for (auto& v : kernel) v /= total;
        Fft fft(n);
        fft.forward(kernel);
        for_each_line(f.grid, a, std::span<cplx>(c), [&](std::span<cplx> line) {
            fft.forward(line);
            for (std::size_t k = 0; k < n; ++k) line[k] *= kernel[k] / static_cast<double>(n);
            fft.inverse(line);
        });
    }
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
    return PhaseDistribution(f.grid, std::move(out), f.provenance);
}

std::vector<double> potential_samples(const Observable& V, const Axis& q) {
    if (!V.is_polynomial() || V.dim() != 1) throw ValidationError("potential must be a 1-D polynomial in q");
    for (const auto& [e, c] : V.polynomial().terms())
        if (e[1] != 0) throw ValidationError("potential must not depend on p");
    std::vector<double> v(q.count);
    for (std::size_t i = 0; i < q.count; ++i) {
        const std::vector<double> x{q[i], 0.0};
        v[i] = V.polynomial().evaluate(x);
    }
    return v;
}

WaveFunction evolve_schrodinger(const WaveFunction& psi, const Observable& V, double t, std::size_t steps, double mass) {
    if (!(mass > 0.0)) throw ValidationError("mass must be positive");
    const auto v = potential_samples(V, psi.q);
    if (t == 0.0) return psi;
    if (steps == 0) throw ValidationError("split-step propagation needs at least one step");
    const double dt = t / static_cast<double>(steps);
    const std::size_t n = psi.q.count;
    const auto kappa = wavenumbers(psi.q);
    std::vector<cplx> half_v(n), kinetic(n);
    for (std::size_t i = 0; i < n; ++i) half_v[i] = std::exp(-i_unit * v[i] * (0.5 * dt / psi.sigma));
    for (std::size_t k = 0; k < n; ++k)
        kinetic[k] = std::exp(-i_unit * (psi.sigma * kappa[k] * kappa[k] * dt / (2.0 * mass))) / static_cast<double>(n);
    Fft fft(n);
    WaveFunction out = psi;
    auto& y = out.values;
    for (std::size_t s = 0; s < steps; ++s) {
        for (std::size_t i = 0; i < n; ++i) y[i] *= half_v[i];
        fft.forward(y);
        for (std::size_t k = 0; k < n; ++k) y[k] *= kinetic[k];
        fft.inverse(y);
        for (std::size_t i = 0; i < n; ++i) y[i] *= half_v[i];
    }
    return out;
}

Polynomial mechanical_hamiltonian(const Observable& V, double mass) {
    if (!(mass > 0.0)) throw ValidationError("mass must be positive");
    if (!V.is_polynomial() || V.dim() != 1) throw ValidationError("potential must be a 1-D polynomial in q");
    for (const auto& [e, c] : V.polynomial().terms())
        if (e[1] != 0) throw ValidationError("potential must not depend on p");
    const Polynomial p = Polynomial::p(1);
    return p * p * (0.5 / mass) + V.polynomial();
}

namespace {

// Pulls f back along feet already moved by Phi_{-t}; zero outside the window for localized f.
PhaseDistribution pull_back(const PhaseDistribution& f, const std::vector<double>& feet, bool localized) {
    const Axis& qa = f.grid.axis(0);
    const Axis& pa = f.grid.axis(1);
    if (!localized) {
        std::vector<std::size_t> outside;
        for (std::size_t n = 0; n < f.grid.size(); ++n)
            if (!inside_window(qa, feet[2 * n]) || !inside_window(pa, feet[2 * n + 1])) outside.push_back(n);
        if (!outside.empty()) {
            std::string list;
            for (std::size_t i = 0; i < std::min<std::size_t>(outside.size(), 10); ++i)
                list += (i ? ", " : "") + std::to_string(outside[i]);
            if (outside.size() > 10) list += ", ...";
            throw OutOfDomainError(std::to_string(outside.size()) + " characteristic(s) leave the grid: " + list);
        }
    }
    const PeriodicBicubic interp(f.grid, f.values);
    std::vector<double> out(f.grid.size(), 0.0);
    for (std::size_t n = 0; n < f.grid.size(); ++n) {
        const double x = feet[2 * n], y = feet[2 * n + 1];
        if (localized && (!inside_window(qa, x) || !inside_window(pa, y))) continue;
        out[n] = interp(x, y);
    }
    return PhaseDistribution(f.grid, std::move(out), f.provenance);
}

class FootTracker {
public:
    FootTracker(const PhaseGrid& grid, const Observable& h, double step)
        : h_(h), step_(step), quadratic_(h.is_polynomial() && h.degree() <= 2), feet_(2 * grid.size()) {
        if (!h.is_polynomial() || h.dim() != 1) throw UnsupportedError("Liouville evolution needs a 1-D polynomial Hamiltonian");
        std::vector<double> x(2);
        for (std::size_t n = 0; n < grid.size(); ++n) {
            grid.node(n, x);
            feet_[2 * n] = x[0];
            feet_[2 * n + 1] = x[1];
        }
    }

    void advance(double dt) {
        if (dt == 0.0) return;
        const auto map = FlowMap::make(h_, -dt, quadratic_ ? Integrator::analytic_quadratic : Integrator::symplectic_leapfrog, step_);
        const Flow flow(map);
        for (std::size_t n = 0; n < feet_.size(); n += 2) flow.apply(std::span<double>(feet_.data() + n, 2));
    }

    const std::vector<double>& feet() const { return feet_; }

private:
    Observable h_;
    double step_;
    bool quadratic_;
    std::vector<double> feet_;
};

}  // namespace

PhaseDistribution evolve_liouville(const PhaseDistribution& f, const Observable& h, double t, double step) {
    if (t == 0.0) return f;
    FootTracker tracker(f.grid, h, step);
    tracker.advance(t);
    return pull_back(f, tracker.feet(), band_negligible(f, 1e-10));
}

double CoherenceCurve::max_deviation() const {
    double m = 0.0;
    for (double d : deviations) m = std::max(m, d);
    return m;
}

CoherenceCurve coherence_experiment(const WaveFunction& psi0, const Observable& V, double t_max, std::size_t samples,
                                    const CoherenceOptions& opts) {
    if (samples == 0) throw ValidationError("coherence experiment needs at least one sample");
    const Axis p = conjugate_p_axis(psi0.q, psi0.sigma, psi0.q.count);
    const Observable h(mechanical_hamiltonian(V, opts.mass));
    const PhaseDistribution f0 = wigner_transform(psi0, p);
    const double N = f0.integral();
    const bool localized = band_negligible(f0, 1e-10);
    FootTracker tracker(f0.grid, h, opts.liouville_step);
    CoherenceCurve curve;
    WaveFunction psi = psi0;
    double t_prev = 0.0;
    for (std::size_t s = 0; s <= samples; ++s) {
        const double t = t_max * static_cast<double>(s) / static_cast<double>(samples);
        const double dt = t - t_prev;
        if (dt != 0.0) {
            const auto steps = static_cast<std::size_t>(std::ceil(std::abs(dt) * opts.schrodinger_steps_per_unit_time));
            psi = evolve_schrodinger(psi, V, dt, std::max<std::size_t>(steps, 1), opts.mass);
            tracker.advance(dt);
        }
        const auto quantum = wigner_transform(psi, p);
        const auto classical = s == 0 ? f0 : pull_back(f0, tracker.feet(), localized);
        curve.times.push_back(t);
        curve.deviations.push_back(l1_distance(quantum, classical) / N);
        t_prev = t;
    }
    return curve;
}

std::vector<double> sigma_limit_experiment(const Axis& q, const std::vector<double>& n, const std::vector<double>& S,
                                           const Axis& p, const std::vector<double>& sigmas, double smear_cells) {
    const auto sheet = smeared(action_distribution(q, n, S, p), smear_cells);
    const auto dS = fd4_derivative(S, q.spacing);
    double peak = 0.0;
    for (double v : n) peak = std::max(peak, v);
    std::vector<double> out;
    for (double sigma : sigmas) {
        std::vector<cplx> v(q.count);
        for (std::size_t i = 0; i < q.count; ++i) {
            if (n[i] > 1e-14 * peak && std::abs(dS[i]) / sigma >= pi / q.spacing)
                throw AliasingError("S'/sigma exceeds the Nyquist wavenumber of the q grid at sigma = " + std::to_string(sigma));
            v[i] = std::sqrt(n[i]) * std::exp(i_unit * S[i] / sigma);
        }
        const auto f = smeared(wigner_transform(WaveFunction(q, std::move(v), sigma), p), smear_cells);
        out.push_back(l1_distance(f, sheet));
    }
    return out;
}

WkbResult wkb_build(const Observable& V, double E, double mass, const Axis& q, double trim) {
    if (!(mass > 0.0)) throw ValidationError("mass must be positive");
    if (!(trim >= 0.0 && trim < 0.5)) throw ValidationError("trim must lie in [0, 0.5)");
    const Observable h(mechanical_hamiltonian(V, mass));
    const MechanicalSystem sys(h);
    WkbSolution sol;
    sol.energy = E;
    sol.mass = mass;
    const bool constant = V.polynomial().degree() == 0;
    if (constant) {
        if (!(E > sys.potential(0.0))) throw DomainError("energy must exceed the constant potential");
        sol.lo = q.start;
        sol.hi = q.last();
    } else {
        const Well well = Well::find(sys);
        const auto tp = turning_points(sys, well, E);
        const double w = tp.hi - tp.lo;
        sol.lo = tp.lo + trim * w;
        sol.hi = tp.hi - trim * w;
        if (sol.lo < q.start || sol.hi > q.last()) throw OutOfDomainError("classically allowed region exceeds the q grid");
    }
    auto momentum = [&](double x) { return std::sqrt(std::max(0.0, 2.0 * mass * (E - sys.potential(x)))); };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double s = 0.0, prev = sol.lo;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < q.count; ++i) {
        const double x = q[i];
        if (x < sol.lo - 1e-12 || x > sol.hi + 1e-12) continue;
        if (x > prev) s += GK::integrate(momentum, prev, x, 10, 1e-15);
        prev = x;
        idx.push_back(i);
        sol.q.push_back(x);
        sol.S.push_back(s);
        sol.dS.push_back(momentum(x));
    }
    if (sol.q.empty()) throw DomainError("no grid node inside the WKB domain");
    double norm = 0.0;
    for (double d : sol.dS) {
        if (!(d > 0.0)) throw DomainError("WKB amplitude is singular inside the domain");
        norm += q.spacing / d;
    }
    for (double d : sol.dS) sol.A.push_back(1.0 / std::sqrt(d * norm));
    std::vector<cplx> psi(q.count, 0.0);
    for (std::size_t k = 0; k < idx.size(); ++k) psi[idx[k]] = sol.A[k] * std::exp(2.0 * pi * i_unit * sol.S[k]);
    return {std::move(sol), WaveFunction(q, std::move(psi), hbar)};
}

}  // namespace geoquant
