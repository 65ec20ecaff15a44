#pragma once

// Prequantum line bundle over T*R^d in one global chart. A section is its local
// representative psi on a PhaseGrid, paired with a connection potential theta (d theta = omega).
//
// Operator convention: f^ psi = (1 / 2 pi i) X_f(psi) + (theta(X_f) + f) psi, which satisfies
// [f^, g^] = i hbar {f, g}^ with the bracket of phasespace.hpp.

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "geoquant/grid.hpp"
#include "geoquant/phasespace.hpp"
#include "geoquant/spectral.hpp"

namespace geoquant {

/// theta among q_dp = sum q dp, p_dq = -sum p dq, symmetric = (1/2) sum (q dp - p dq).
class ConnectionPotential {
public:
    enum class Form { q_dp, p_dq, symmetric };

    ConnectionPotential(Form form = Form::symmetric) : form_(form) {}  // NOLINT: implicit by design
    static ConnectionPotential parse(const std::string& name);

    Form form() const { return form_; }
    std::string name() const;
    /// theta at `point` applied to `tangent`.
    double evaluate(std::span<const double> point, std::span<const double> tangent) const;
    /// G with theta = theta_symmetric + dG.
    double gauge_function(std::span<const double> point) const;

    bool operator==(const ConnectionPotential&) const = default;

private:
    Form form_;
};

struct GridSection {
    PhaseGrid grid;
    std::vector<cplx> values;
    ConnectionPotential gauge;

    GridSection(PhaseGrid g, std::vector<cplx> v, ConnectionPotential theta = {});
    /// The same section in another gauge: psi_b = exp(-2 pi i (G_b - G_a)) psi_a.
    GridSection regauged(const ConnectionPotential& to) const;
    double norm() const;
};

struct PrequantumOperator {
    Observable phi;
    ConnectionPotential gauge;
};

/// <s1, s2> = sum s1 conj(s2) * cell_volume.
cplx inner_product(const GridSection& s1, const GridSection& s2);

/// Nodewise f^ s. Derivatives of s are spectral on periodic grids and 4th-order differences otherwise.
/// A sampled f on an open grid needs s to vanish in the two-node boundary band (BoundaryError otherwise).
GridSection apply_operator(const PrequantumOperator& op, const GridSection& s);

/// ||([f^, g^] - i hbar {f,g}^) s|| / ||s|| for polynomial f, g of degree <= 3.
double commutator_defect(const Observable& f, const Observable& g, const GridSection& s);

/// exp(2 pi i oint theta) along a closed polygon (exact for the linear potentials).
cplx holonomy(const ConnectionPotential& gauge, const std::vector<PhasePoint>& loop);

/// Forward evolution U_t psi(x) = exp(-2 pi i int_0^t L(rho_{-tau} x) d tau) psi(rho_{-t} x),
/// L = theta(X_h) + h, so that i hbar d/dt U_t psi = U_t h^ psi.
/// `steps` midpoint substeps (0 selects 64 per unit time). Quadratic h uses the analytic flow;
/// higher degree uses leapfrog and needs steps >= ceil(|t| / 1e-3).
/// On periodic grids a section that vanishes near the window edges is extended by zero outside
/// the window; any other section is a torus section and pull-backs wrap. On open grids a
/// pull-back leaving the grid raises OutOfDomainError.
GridSection evolve(const Observable& h, double t, const GridSection& s, std::size_t steps = 0);

}  // namespace geoquant
