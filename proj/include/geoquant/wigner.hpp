#pragma once

// Phase-space distributions of 1-D wave functions.
//
// Transform convention (p conjugate to k at scale 1, sigma inside the arguments of psi):
//     f(q, p) = (1/2 pi) int dk e^{-i k p} psi*(q - sigma k/2) psi(q + sigma k/2),
// so that int f dp = |psi|^2 and int f1 f2 = |<psi1|psi2>|^2 / (2 pi sigma).
// With K p-nodes of spacing dp the k-grid has spacing dk = 2 pi / (K dp); the p-range K dp must
// cover the band limit of psi, K dp >= 2 pi sigma / dq.

#include <vector>

#include "geoquant/grid.hpp"
#include "geoquant/phasespace.hpp"
#include "geoquant/spectral.hpp"

namespace geoquant {

struct WaveFunction {
    Axis q;
    std::vector<cplx> values;
    double sigma;

    /// The q axis must have a power-of-two node count; it is treated as periodic.
    WaveFunction(Axis q_axis, std::vector<cplx> v, double sigma);
    /// Cell-weighted sum |psi|^2 dq.
    double norm_squared() const;
    cplx inner(const WaveFunction& other) const;  // int conj(psi) other dq
};

enum class Provenance { action, wigner, generic };

struct PhaseDistribution {
    PhaseGrid grid;  // periodic (q, p) plane
    std::vector<double> values;
    Provenance provenance = Provenance::generic;
    double particle_number = 0.0;

    PhaseDistribution(PhaseGrid g, std::vector<double> v, Provenance prov = Provenance::generic);
    double integral() const;
    /// int f dp at each q node.
    std::vector<double> q_marginal() const;
    /// int f dq at each p node.
    std::vector<double> p_marginal() const;
};

/// The p axis with K nodes, p = 0 at index K/2 and K dp = 2 pi sigma / dq.
Axis conjugate_p_axis(const Axis& q, double sigma, std::size_t count);

/// Wigner transform via spectral half-shifts and an FFT over k. AliasingError when the p axis
/// does not cover the band limit or is not centered; the message names the required axis.
PhaseDistribution wigner_transform(const WaveFunction& psi, const Axis& p);

/// The action distribution with Fourier data n e^{i k dS/dq}: the sheet n(q) delta(p - dS/dq)
/// as a band-limited kernel on the p grid. dS/dq from 4th-order differences of S.
/// DomainError for negative density.
PhaseDistribution action_distribution(const Axis& q, const std::vector<double>& n, const std::vector<double>& S,
                                      const Axis& p);

/// Cell-weighted int f1 f2. ShapeError on grid mismatch.
double overlap(const PhaseDistribution& f1, const PhaseDistribution& f2);

/// Cell-weighted int |f1 - f2|.
double l1_distance(const PhaseDistribution& f1, const PhaseDistribution& f2);

/// Periodic convolution with a normalized Gaussian of standard deviation `cells` grid cells on both axes.
PhaseDistribution smeared(const PhaseDistribution& f, double cells);

/// V(q) samples of a potential given as a polynomial in q alone (ValidationError if it involves p).
std::vector<double> potential_samples(const Observable& V, const Axis& q);

/// Strang split-step propagation of i sigma psi_t = -(sigma^2 / 2m) psi_qq + V psi.
WaveFunction evolve_schrodinger(const WaveFunction& psi, const Observable& V, double t, std::size_t steps, double mass = 1.0);

/// h = p^2 / 2m + V(q) as a phase-space polynomial.
Polynomial mechanical_hamiltonian(const Observable& V, double mass = 1.0);

/// f(., t) = f o Phi_{-t} with bicubic B-spline values at the pulled-back points. Quadratic h uses
/// the exact flow, otherwise leapfrog with the given step. A distribution that vanishes (below 1e-10
/// of its peak) in the two-node edge band is zero outside the window; for any other distribution a
/// characteristic leaving the window raises OutOfDomainError.
PhaseDistribution evolve_liouville(const PhaseDistribution& f, const Observable& h, double t, double step = 1e-2);

struct CoherenceCurve {
    std::vector<double> times;
    std::vector<double> deviations;  // D(t) = ||wigner(psi(t)) - liouville(wigner(psi0), t)||_1 / N

    double max_deviation() const;
};

struct CoherenceOptions {
    double mass = 1.0;
    double schrodinger_steps_per_unit_time = 1000.0;
    double liouville_step = 1e-2;
};

/// D(t) at t_s = s t_max / samples, s = 0..samples; the p axis is the conjugate axis with as many
/// nodes as the q axis.
CoherenceCurve coherence_experiment(const WaveFunction& psi0, const Observable& V, double t_max, std::size_t samples,
                                    const CoherenceOptions& opts = {});

/// Smeared L1 distance between wigner(sqrt(n) e^{iS/sigma}) and the action distribution of (n, S)
/// for each sigma; AliasingError when S'/sigma exceeds the q grid's Nyquist wavenumber.
std::vector<double> sigma_limit_experiment(const Axis& q, const std::vector<double>& n, const std::vector<double>& S,
                                           const Axis& p, const std::vector<double>& sigmas, double smear_cells = 3.0);

struct WkbSolution {
    double energy = 0.0;
    double mass = 1.0;
    double lo = 0.0, hi = 0.0;       // domain, trimmed inside the turning points
    std::vector<double> q;           // grid nodes inside the domain
    std::vector<double> S, dS, A;    // generating function, its derivative, amplitude
};

struct WkbResult {
    WkbSolution solution;
    WaveFunction psi;  // A e^{2 pi i S} on the full axis, zero outside the domain; sigma = hbar
};

/// S(q) = int_lo^q sqrt(2m(E - V)), A = (S')^{-1/2} normalized on the domain. The domain is
/// [q- + trim w, q+ - trim w] with w = q+ - q- for a well, or the whole axis for constant V < E.
/// Errors as for turning points (no well, unbound orbit, E outside the well).
WkbResult wkb_build(const Observable& V, double E, double mass, const Axis& q, double trim = 1e-2);

}  // namespace geoquant
