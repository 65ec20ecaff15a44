#pragma once

// Bohr-Wilson-Sommerfeld quantization of 1-D Hamiltonians h = p^2/2m + V(q):
// the orbit at energy E encloses the action I(E) = oint p dq, and the levels satisfy I(E_n) = n (h = 1).

#include <functional>
#include <map>
#include <vector>

#include "geoquant/phasespace.hpp"

namespace geoquant {

/// h split as p^2 / 2m + V(q). Polynomial V is exact; a sampled h is read along p = 0 and
/// interpolated with a cubic B-spline over the grid's q range.
class MechanicalSystem {
public:
    explicit MechanicalSystem(const Observable& h);

    double mass() const { return mass_; }
    double potential(double q) const { return v_(q); }
    double force(double q) const { return -dv_(q); }
    double curvature(double q) const { return d2v_(q); }
    /// Domain of q (infinite for polynomial V).
    double q_lo() const { return lo_; }
    double q_hi() const { return hi_; }
    const Observable& hamiltonian() const { return h_; }

    /// Critical points of V in increasing order.
    const std::vector<double>& critical_points() const { return crit_; }

private:
    Observable h_;
    double mass_ = 1.0;
    std::function<double(double)> v_, dv_, d2v_;
    double lo_, hi_;
    std::vector<double> crit_;
};

/// The potential well the BWS condition is applied in: the lowest local minimum of V,
/// and the energy at which the orbit stops being a closed single-well curve.
struct Well {
    double q_min;
    double v_min;
    double e_top;  // +inf when V grows without bound on both sides
    double q_left_limit, q_right_limit;  // adjacent maxima or domain ends (+-inf for none)

    static Well find(const MechanicalSystem& sys);
};

struct TurningPoints {
    double lo, hi;
};

/// Classical turning points q- < q+ bracketing the well minimum at energy E.
/// Errors: E below the minimum (DomainError), unbound orbit (DomainError), E at or above a barrier top (RangeError).
TurningPoints turning_points(const MechanicalSystem& sys, const Well& well, double E);

/// I(E) = 2 int_{q-}^{q+} sqrt(2m(E - V)) dq with q = q- + (q+ - q-)(1 - cos u)/2 removing the endpoint
/// square roots. Returns 0 at the well minimum.
double action_integral(const Observable& h, double E);
double action_integral(const MechanicalSystem& sys, const Well& well, double E);

/// Period T(E) = dI/dE = 2 int m / p dq.
double orbit_period(const MechanicalSystem& sys, const Well& well, double E);

struct ActionProfile {
    std::vector<double> energies;
    std::vector<double> actions;
    std::vector<TurningPoints> turning_points;
};

ActionProfile action_profile(const Observable& h, const std::vector<double>& energies);

struct BwsLevels {
    std::map<int, double> levels;   // n -> E_n
    std::map<int, double> actions;  // n -> I(E_n)
    double solver_tol = 1e-12;
};

/// Solves I(E_n) = n for n = 1..n_max by bisection on the monotone branch.
/// RangeError (with the largest attainable n) when n_max exceeds the well's action range.
BwsLevels bws_levels(const Observable& h, int n_max, double solver_tol = 1e-12);

/// The orbit at energy E traced by integrating Hamilton's equations for one period from the left
/// turning point with `samples` leapfrog steps; the returned loop is closed (last == first).
std::vector<PhasePoint> trace_orbit(const Observable& h, double E, std::size_t samples = 200000);

}  // namespace geoquant
