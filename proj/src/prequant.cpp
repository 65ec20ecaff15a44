#include "geoquant/prequant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "geoquant/constants.hpp"
#include "geoquant/error.hpp"

namespace geoquant {

namespace {

constexpr cplx i_unit{0.0, 1.0};

std::vector<cplx> complex_derivative(const PhaseGrid& grid, std::span<const cplx> values, std::size_t a) {
    if (grid.periodic()) return spectral_derivative(grid, values, a);
    std::vector<cplx> out(values.begin(), values.end());
    const double h = grid.axis(a).spacing;
    std::vector<double> re, im;
    for_each_line(grid, a, std::span<cplx>(out), [&](std::span<cplx> line) {
        re.resize(line.size());
        im.resize(line.size());
        for (std::size_t i = 0; i < line.size(); ++i) {
            re[i] = line[i].real();
            im[i] = line[i].imag();
        }
        const auto dr = fd4_derivative(re, h), di = fd4_derivative(im, h);
        for (std::size_t i = 0; i < line.size(); ++i) line[i] = {dr[i], di[i]};
    });
    return out;
}

bool band_negligible(const GridSection& s, double rel) {
    const PhaseGrid& g = s.grid;
    double peak = 0.0;
    for (const auto& v : s.values) peak = std::max(peak, std::abs(v));
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto idx = g.multi_index(n);
        bool band = false;
        for (std::size_t a = 0; a < g.rank(); ++a) band |= idx[a] < 2 || idx[a] + 2 >= g.axis(a).count;
        if (band && std::abs(s.values[n]) > rel * peak) return false;
    }
    return true;
}

bool in_fundamental_box(const PhaseGrid& g, std::span<const double> x) {
    for (std::size_t a = 0; a < g.rank(); ++a) {
        const Axis& ax = g.axis(a);
        if (x[a] < ax.start || x[a] >= ax.start + ax.period()) return false;
    }
    return true;
}

std::vector<double> observable_values(const Observable& f, const PhaseGrid& grid) {
    if (!f.is_polynomial()) return f.sample_on(grid);
    PolynomialGradient ev(f.polynomial());
    std::vector<double> out(grid.size()), x(grid.rank());
    for (std::size_t n = 0; n < grid.size(); ++n) {
        grid.node(n, x);
        out[n] = ev.value(x);
    }
    return out;
}

}  // namespace

ConnectionPotential ConnectionPotential::parse(const std::string& name) {
    if (name == "q_dp") return Form::q_dp;
    if (name == "p_dq") return Form::p_dq;
    if (name == "symmetric") return Form::symmetric;
    throw ValidationError("unknown connection potential '" + name + "' (expected q_dp, p_dq or symmetric)");
}

std::string ConnectionPotential::name() const {
    switch (form_) {
        case Form::q_dp: return "q_dp";
        case Form::p_dq: return "p_dq";
        case Form::symmetric: return "symmetric";
    }
    return {};
}

double ConnectionPotential::evaluate(std::span<const double> x, std::span<const double> v) const {
    const std::size_t d = x.size() / 2;
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const double q = x[k], p = x[d + k], vq = v[k], vp = v[d + k];
        switch (form_) {
            case Form::q_dp: s += q * vp; break;
            case Form::p_dq: s -= p * vq; break;
            case Form::symmetric: s += 0.5 * (q * vp - p * vq); break;
        }
    }
    return s;
}

double ConnectionPotential::gauge_function(std::span<const double> x) const {
    const std::size_t d = x.size() / 2;
    double qp = 0.0;
    for (std::size_t k = 0; k < d; ++k) qp += x[k] * x[d + k];
    switch (form_) {
        case Form::q_dp: return 0.5 * qp;
        case Form::p_dq: return -0.5 * qp;
        case Form::symmetric: return 0.0;
    }
    return 0.0;
}

GridSection::GridSection(PhaseGrid g, std::vector<cplx> v, ConnectionPotential theta)
    : grid(std::move(g)), values(std::move(v)), gauge(theta) {
    if (values.size() != grid.size()) throw ShapeError("section values do not match grid");
}

GridSection GridSection::regauged(const ConnectionPotential& to) const {
    GridSection out = *this;
    out.gauge = to;
    std::vector<double> x(grid.rank());
    for (std::size_t n = 0; n < grid.size(); ++n) {
        grid.node(n, x);
        const double g = to.gauge_function(x) - gauge.gauge_function(x);
        out.values[n] *= std::exp(-2.0 * std::numbers::pi * i_unit * g);
    }
    return out;
}

double GridSection::norm() const { return std::sqrt(inner_product(*this, *this).real()); }

cplx inner_product(const GridSection& s1, const GridSection& s2) {
    if (!(s1.grid == s2.grid)) throw ShapeError("sections live on different grids");
    if (!(s1.gauge == s2.gauge)) throw ShapeError("sections are expressed in different gauges");
    cplx sum{};
    for (std::size_t n = 0; n < s1.values.size(); ++n) sum += s1.values[n] * std::conj(s2.values[n]);
    return sum * s1.grid.cell_volume();
}

GridSection apply_operator(const PrequantumOperator& op, const GridSection& s) {
    if (!(op.gauge == s.gauge)) throw ShapeError("operator and section use different gauges");
    const PhaseGrid& g = s.grid;
    if (op.phi.dim() != g.dim()) throw ShapeError("observable dimension does not match grid");
    if (!op.phi.is_polynomial() && !g.periodic() && !band_negligible(s, 1e-12))
        throw BoundaryError("section does not vanish within two nodes of the open grid boundary; pad the grid");
    const auto field = hamiltonian_vector_field(op.phi, g);
    const auto fvals = observable_values(op.phi, g);
    GridSection out(g, std::vector<cplx>(g.size()), s.gauge);
    std::vector<double> x(g.rank()), v(g.rank());
    for (std::size_t n = 0; n < g.size(); ++n) {
        g.node(n, x);
        for (std::size_t a = 0; a < g.rank(); ++a) v[a] = field[a][n];
        out.values[n] = (op.gauge.evaluate(x, v) + fvals[n]) * s.values[n];
    }
    const cplx lie = 1.0 / (2.0 * std::numbers::pi * i_unit);
    for (std::size_t a = 0; a < g.rank(); ++a) {
        const auto& xa = field[a];
        if (std::all_of(xa.begin(), xa.end(), [](double c) { return c == 0.0; })) continue;
        const auto d = complex_derivative(g, s.values, a);
        for (std::size_t n = 0; n < g.size(); ++n) out.values[n] += lie * xa[n] * d[n];
    }
    return out;
}

double commutator_defect(const Observable& f, const Observable& g, const GridSection& s) {
    if (!f.is_polynomial() || !g.is_polynomial())
        throw PreconditionError("commutator_defect needs polynomial observables");
    if (f.degree() > 3 || g.degree() > 3) throw PreconditionError("commutator_defect needs degree <= 3");
    const PrequantumOperator F{f, s.gauge}, G{g, s.gauge};
    const PrequantumOperator B{Observable(poisson_bracket(f.polynomial(), g.polynomial())), s.gauge};
    const auto fgs = apply_operator(F, apply_operator(G, s));
    const auto gfs = apply_operator(G, apply_operator(F, s));
    const auto bs = apply_operator(B, s);
    GridSection r = fgs;
    for (std::size_t n = 0; n < r.values.size(); ++n) r.values[n] = fgs.values[n] - gfs.values[n] - i_unit * hbar * bs.values[n];
    return r.norm() / s.norm();
}

cplx holonomy(const ConnectionPotential& gauge, const std::vector<PhasePoint>& loop) {
    if (loop.empty()) throw PreconditionError("holonomy needs a non-empty loop");
    const auto& first = loop.front();
    const auto& last = loop.back();
    if (first.size() % 2 != 0 || first.empty()) throw ShapeError("loop points need 2d coordinates");
    for (std::size_t a = 0; a < first.size(); ++a)
        if (std::abs(first[a] - last[a]) > 1e-12) throw PreconditionError("loop is not closed (first != last)");
    double integral = 0.0;
    std::vector<double> dx(first.size());
    for (std::size_t n = 0; n + 1 < loop.size(); ++n) {
        if (loop[n + 1].size() != first.size()) throw ShapeError("loop points differ in dimension");
        for (std::size_t a = 0; a < dx.size(); ++a) dx[a] = loop[n + 1][a] - loop[n][a];
        integral += 0.5 * (gauge.evaluate(loop[n], dx) + gauge.evaluate(loop[n + 1], dx));
    }
    const double frac = integral - std::round(integral);
    return std::exp(2.0 * std::numbers::pi * i_unit * frac);
}

GridSection evolve(const Observable& h, double t, const GridSection& s, std::size_t steps) {
    if (!h.is_polynomial()) throw UnsupportedError("evolve needs a polynomial Hamiltonian");
    if (h.dim() != s.grid.dim()) throw ShapeError("Hamiltonian dimension does not match grid");
    if (t == 0.0) return s;
    const bool quadratic = h.degree() <= 2;
    if (steps == 0) steps = static_cast<std::size_t>(std::ceil(64.0 * std::abs(t)));
    if (!quadratic && static_cast<double>(steps) < std::ceil(std::abs(t) / 1e-3 - 1e-9))
        throw PreconditionError("leapfrog evolution needs steps >= ceil(|t| / 1e-3)");
    const double dt = t / static_cast<double>(steps);
    const auto half = FlowMap::make(h, -0.5 * dt, quadratic ? Integrator::analytic_quadratic : Integrator::symplectic_leapfrog,
                                    0.5 * std::abs(dt));
    const Flow flow(half);
    const PolynomialGradient ev(h.polynomial());
    const PhaseGrid& g = s.grid;
    const std::size_t r = g.rank();

    std::vector<std::vector<double>> feet(g.size(), std::vector<double>(r));
    std::vector<double> phase(g.size());
    std::vector<double> grad(r), field(r);
    std::vector<std::size_t> outside;
    for (std::size_t n = 0; n < g.size(); ++n) {
        auto& x = feet[n];
        g.node(n, x);
        double acc = 0.0;
        for (std::size_t k = 0; k < steps; ++k) {
            flow.apply(x);
            ev.gradient(x, grad);
            for (std::size_t a = 0; a < r / 2; ++a) {
                field[a] = grad[r / 2 + a];
                field[r / 2 + a] = -grad[a];
            }
            acc += s.gauge.evaluate(x, field) + ev.value(x);
            flow.apply(x);
        }
        phase[n] = acc * dt;
        if (!g.periodic() && !g.contains(x)) outside.push_back(n);
    }
    if (!outside.empty()) {
        std::string list;
        for (std::size_t i = 0; i < std::min<std::size_t>(outside.size(), 10); ++i) list += (i ? ", " : "") + std::to_string(outside[i]);
        if (outside.size() > 10) list += ", ...";
        throw OutOfDomainError(std::to_string(outside.size()) + " node(s) flow out of the grid: " + list);
    }
    // A section negligible near the edges of a periodic grid lives on T*R^d and is zero outside
    // the window; one that fills the window is a torus section and pull-backs wrap.
    const bool localized = g.periodic() && band_negligible(s, 1e-10);
    const TrigInterpolant interp(g, s.values);
    GridSection out(g, std::vector<cplx>(g.size()), s.gauge);
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (localized && !in_fundamental_box(g, feet[n])) continue;
        out.values[n] = std::exp(-2.0 * std::numbers::pi * i_unit * phase[n]) * interp(feet[n]);
    }
    return out;
}

}  // namespace geoquant
