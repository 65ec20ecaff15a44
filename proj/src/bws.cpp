#include "geoquant/bws.hpp"

#include <Eigen/Dense>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "geoquant/error.hpp"

namespace geoquant {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Coefficients c_k of V(q) = sum c_k q^k.
std::vector<double> q_coefficients(const Polynomial& v) {
    std::vector<double> c(static_cast<std::size_t>(v.degree()) + 1, 0.0);
    for (const auto& [e, coef] : v.terms()) c[static_cast<std::size_t>(e[0])] += coef;
    return c;
}

double horner(const std::vector<double>& c, double x) {
    double s = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) s = s * x + c[k];
    return s;
}

std::vector<double> differentiate(const std::vector<double>& c) {
    if (c.size() <= 1) return {0.0};
    std::vector<double> d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = static_cast<double>(k) * c[k];
    return d;
}

// Real roots of a polynomial via the companion matrix, polished by Newton steps.
std::vector<double> real_roots(std::vector<double> c) {
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();
    const std::size_t deg = c.size() - 1;
    if (deg == 0) return {};
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<long>(deg), static_cast<long>(deg));
    for (std::size_t i = 1; i < deg; ++i) comp(static_cast<long>(i), static_cast<long>(i - 1)) = 1.0;
    for (std::size_t i = 0; i < deg; ++i) comp(static_cast<long>(i), static_cast<long>(deg - 1)) = -c[i] / c[deg];
    const Eigen::VectorXcd ev = comp.eigenvalues();
    const auto dc = differentiate(c);
    std::vector<double> roots;
    for (long i = 0; i < ev.size(); ++i) {
        if (std::abs(ev[i].imag()) > 1e-6 * (1.0 + std::abs(ev[i].real()))) continue;
        double x = ev[i].real();
        for (int it = 0; it < 20; ++it) {
            const double d = horner(dc, x);
            if (d == 0.0) break;
            const double step = horner(c, x) / d;
            if (!std::isfinite(step) || std::abs(step) > 1e-3 * (1.0 + std::abs(x))) break;
            x -= step;
            if (std::abs(step) <= 1e-16 * (1.0 + std::abs(x))) break;
        }
        roots.push_back(x);
    }
    std::sort(roots.begin(), roots.end());
    // merge clusters from multiple roots
    std::vector<double> out;
    for (double r : roots)
        if (out.empty() || std::abs(r - out.back()) > 1e-6 * (1.0 + std::abs(r))) out.push_back(r);
    return out;
}

void require_dim1(const Observable& h) {
    if (h.dim() != 1) throw UnsupportedError("BWS quantization is implemented for one degree of freedom");
}

}  // namespace

MechanicalSystem::MechanicalSystem(const Observable& h) : h_(h) {
    require_dim1(h);
    if (h.is_polynomial()) {
        Polynomial v(1);
        double kinetic = 0.0;
        for (const auto& [e, c] : h.polynomial().terms()) {
            if (e[1] == 0) v.add_term(e, c);
            else if (e[1] == 2 && e[0] == 0) kinetic = c;
            else throw ValidationError("Hamiltonian must have the form p^2/2m + V(q)");
        }
        if (!(kinetic > 0.0)) throw ValidationError("kinetic term p^2/2m needs m > 0");
        mass_ = 0.5 / kinetic;
        auto c = std::make_shared<std::vector<double>>(q_coefficients(v));
        auto d = std::make_shared<std::vector<double>>(differentiate(*c));
        auto dd = std::make_shared<std::vector<double>>(differentiate(*d));
        v_ = [c](double q) { return horner(*c, q); };
        dv_ = [d](double q) { return horner(*d, q); };
        d2v_ = [dd](double q) { return horner(*dd, q); };
        lo_ = -inf;
        hi_ = inf;
        crit_ = real_roots(*d);
        return;
    }
    const PhaseGrid& g = h.grid();
    const Axis& qa = g.axis(0);
    const Axis& pa = g.axis(1);
    long j0 = -1;
    for (std::size_t j = 0; j < pa.count; ++j)
        if (std::abs(pa[j]) <= 1e-12 * pa.spacing) j0 = static_cast<long>(j);
    if (j0 < 0 || static_cast<std::size_t>(j0) + 1 >= pa.count)
        throw ValidationError("sampled Hamiltonian needs p = 0 and the next p node on its grid");
    const auto& s = h.samples();
    std::vector<double> v(qa.count);
    double kinetic = 0.0;
    for (std::size_t i = 0; i < qa.count; ++i) {
        v[i] = s[i * pa.count + static_cast<std::size_t>(j0)];
        const double dk = s[i * pa.count + static_cast<std::size_t>(j0) + 1] - v[i];
        if (i == 0) kinetic = dk;
        else if (std::abs(dk - kinetic) > 1e-8 * std::abs(kinetic))
            throw ValidationError("sampled Hamiltonian is not of the form p^2/2m + V(q)");
    }
    const double p1 = pa[static_cast<std::size_t>(j0) + 1];
    if (!(kinetic > 0.0)) throw ValidationError("kinetic term p^2/2m needs m > 0");
    mass_ = p1 * p1 / (2.0 * kinetic);
    auto spline = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
        v.data(), v.size(), qa.start, qa.spacing);
    v_ = [spline](double q) { return (*spline)(q); };
    dv_ = [spline](double q) { return spline->prime(q); };
    d2v_ = [spline](double q) { return spline->double_prime(q); };
    lo_ = qa.start;
    hi_ = qa.last();
    // critical points: sign changes of V' on a refined scan, then bisection
    const std::size_t m = 8 * qa.count;
    const double h_scan = (hi_ - lo_) / static_cast<double>(m);
    double prev = dv_(lo_);
    for (std::size_t k = 1; k <= m; ++k) {
        const double x = lo_ + h_scan * static_cast<double>(k);
        const double cur = dv_(x);
        if ((prev < 0.0) != (cur < 0.0) && prev != 0.0) {
            const auto r = boost::math::tools::bisect([&](double t) { return dv_(t); }, x - h_scan, x,
                                                      boost::math::tools::eps_tolerance<double>(50));
            crit_.push_back(0.5 * (r.first + r.second));
        }
        prev = cur;
    }
}

Well Well::find(const MechanicalSystem& sys) {
    struct Crit {
        double q;
        bool is_min, is_max;
    };
    std::vector<Crit> crit;
    for (double c : sys.critical_points()) {
        const double delta = 1e-4 * (1.0 + std::abs(c));
        const double left = -sys.force(c - delta), right = -sys.force(c + delta);
        crit.push_back({c, left < 0.0 && right > 0.0, left > 0.0 && right < 0.0});
    }
    const Crit* best = nullptr;
    for (const auto& c : crit)
        if (c.is_min && (!best || sys.potential(c.q) < sys.potential(best->q))) best = &c;
    if (!best) throw DomainError("potential has no well (no local minimum)");
    Well w{best->q, sys.potential(best->q), inf, sys.q_lo(), sys.q_hi()};
    for (const auto& c : crit) {
        if (!c.is_max) continue;
        if (c.q < w.q_min) w.q_left_limit = std::max(w.q_left_limit, c.q);
        if (c.q > w.q_min) w.q_right_limit = std::min(w.q_right_limit, c.q);
    }
    for (double lim : {w.q_left_limit, w.q_right_limit})
        if (std::isfinite(lim)) w.e_top = std::min(w.e_top, sys.potential(lim));
    return w;
}

TurningPoints turning_points(const MechanicalSystem& sys, const Well& well, double E) {
    if (E < well.v_min) throw DomainError("energy lies below the well minimum");
    if (E == well.v_min) return {well.q_min, well.q_min};
    if (E >= well.e_top)
        throw RangeError("energy reaches the barrier top or domain edge of the well (E_top = " +
                         std::to_string(well.e_top) + ")");
    auto f = [&](double q) { return E - sys.potential(q); };
    auto bracket = [&](double limit, double dir) {
        if (std::isfinite(limit)) return limit;
        double step = 1e-3 * (1.0 + std::abs(well.q_min));
        double x = well.q_min + dir * step;
        while (f(x) >= 0.0) {
            step *= 2.0;
            x = well.q_min + dir * step;
            if (step > 1e12) throw DomainError("no classical turning point: the orbit is unbound");
        }
        return x;
    };
    const boost::math::tools::eps_tolerance<double> tol(52);
    const double b_hi = bracket(well.q_right_limit, 1.0), b_lo = bracket(well.q_left_limit, -1.0);
    const auto hi = boost::math::tools::bisect(f, well.q_min, b_hi, tol);
    const auto lo = boost::math::tools::bisect(f, b_lo, well.q_min, tol);
    TurningPoints tp{0.5 * (lo.first + lo.second), 0.5 * (hi.first + hi.second)};
    for (double q : {tp.lo, tp.hi}) {
        const double slope = std::abs(sys.force(q));
        if (slope <= 1e-12 * (1.0 + std::abs(E - well.v_min)))
            throw RangeError("turning point is a double root of E - V (barrier top)");
    }
    return tp;
}

namespace {

// E replaced by V at the computed turning points (they agree with E to rounding), so that the
// kinetic energy vanishes exactly at both ends and 1/p keeps its integrable form.
struct EdgeEnergy {
    double at_lo, at_hi;
    double operator()(double u) const { return 0.5 * (at_lo * (1.0 + std::cos(u)) + at_hi * (1.0 - std::cos(u))); }
};

template <typename F>
double integrate_0_pi(F&& f) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, std::numbers::pi, 15, 1e-14);
}

}  // namespace

double action_integral(const MechanicalSystem& sys, const Well& well, double E) {
    const auto tp = turning_points(sys, well, E);
    const double delta = tp.hi - tp.lo;
    if (delta == 0.0) return 0.0;
    const double m2 = 2.0 * sys.mass();
    const EdgeEnergy ee{sys.potential(tp.lo), sys.potential(tp.hi)};
    auto integrand = [&](double u) {
        const double q = tp.lo + 0.5 * delta * (1.0 - std::cos(u));
        return std::sqrt(std::max(0.0, m2 * (ee(u) - sys.potential(q)))) * 0.5 * delta * std::sin(u);
    };
    return 2.0 * integrate_0_pi(integrand);
}

double action_integral(const Observable& h, double E) {
    const MechanicalSystem sys(h);
    return action_integral(sys, Well::find(sys), E);
}

double orbit_period(const MechanicalSystem& sys, const Well& well, double E) {
    const auto tp = turning_points(sys, well, E);
    const double delta = tp.hi - tp.lo;
    if (delta == 0.0) return 2.0 * std::numbers::pi * std::sqrt(sys.mass() / sys.curvature(well.q_min));
    const double m = sys.mass();
    const EdgeEnergy ee{sys.potential(tp.lo), sys.potential(tp.hi)};
    auto integrand = [&](double u) {
        const double q = tp.lo + 0.5 * delta * (1.0 - std::cos(u));
        const double ke = ee(u) - sys.potential(q);
        if (!(ke > 0.0)) return 0.0;
        return m / std::sqrt(2.0 * m * ke) * 0.5 * delta * std::sin(u);
    };
    return 2.0 * integrate_0_pi(integrand);
}

ActionProfile action_profile(const Observable& h, const std::vector<double>& energies) {
    const MechanicalSystem sys(h);
    const Well well = Well::find(sys);
    ActionProfile prof;
    for (double e : energies) {
        prof.energies.push_back(e);
        prof.turning_points.push_back(turning_points(sys, well, e));
        prof.actions.push_back(action_integral(sys, well, e));
    }
    return prof;
}

BwsLevels bws_levels(const Observable& h, int n_max, double solver_tol) {
    if (n_max < 0) throw ValidationError("n_max must be non-negative");
    BwsLevels out;
    out.solver_tol = solver_tol;
    if (n_max == 0) return out;
    const MechanicalSystem sys(h);
    const Well well = Well::find(sys);
    auto action = [&](double e) { return action_integral(sys, well, e); };

    double e_cap = inf;
    if (std::isfinite(well.e_top)) {
        e_cap = well.e_top - 1e-10 * (well.e_top - well.v_min);
        const double i_top = action(e_cap);
        if (static_cast<double>(n_max) > i_top)
            throw RangeError("n = " + std::to_string(n_max) + " exceeds the well's action range; max attainable n = " +
                             std::to_string(static_cast<long>(std::floor(i_top))));
    }
    double lo = well.v_min;
    for (int n = 1; n <= n_max; ++n) {
        const double target = n;
        double hi = e_cap;
        if (!std::isfinite(hi)) {
            double span = 1.0;
            hi = lo + span;
            while (action(hi) < target) {
                span *= 2.0;
                hi = lo + span;
                if (span > 1e300) throw NumericError("could not bracket the BWS level");
            }
        }
        const auto r = boost::math::tools::bisect([&](double e) { return action(e) - target; }, lo, hi,
                                                  boost::math::tools::eps_tolerance<double>(52));
        const double e = 0.5 * (r.first + r.second);
        const double i = action(e);
        if (std::abs(i - target) >= solver_tol * std::max(1.0, target))
            throw NumericError("BWS level " + std::to_string(n) + " did not converge");
        out.levels[n] = e;
        out.actions[n] = i;
        lo = e;
    }
    return out;
}

std::vector<PhasePoint> trace_orbit(const Observable& h, double E, std::size_t samples) {
    if (samples < 8) throw ValidationError("orbit tracing needs at least 8 samples");
    const MechanicalSystem sys(h);
    const Well well = Well::find(sys);
    const auto tp = turning_points(sys, well, E);
    const double period = orbit_period(sys, well, E);
    const double dt = period / static_cast<double>(samples);
    const double m = sys.mass();
    std::vector<PhasePoint> loop;
    loop.reserve(samples + 1);
    double q = tp.lo, p = 0.0;
    loop.push_back({q, p});
    for (std::size_t k = 1; k < samples; ++k) {
        p += 0.5 * dt * sys.force(q);
        q += dt * p / m;
        p += 0.5 * dt * sys.force(q);
        loop.push_back({q, p});
    }
    loop.push_back(loop.front());
    return loop;
}

}  // namespace geoquant
