#include "geoquant/phasespace.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <string>

#include "geoquant/error.hpp"
#include "geoquant/spectral.hpp"

namespace geoquant {

// ---------------------------------------------------------------- Polynomial

Polynomial Polynomial::constant(std::size_t dim, double c) {
    Polynomial p(dim);
    p.add_term(MultiIndex(2 * dim, 0), c);
    return p;
}

Polynomial Polynomial::q(std::size_t dim, std::size_t k) {
    MultiIndex e(2 * dim, 0);
    e.at(k) = 1;
    Polynomial p(dim);
    p.add_term(e, 1.0);
    return p;
}

Polynomial Polynomial::p(std::size_t dim, std::size_t k) {
    MultiIndex e(2 * dim, 0);
    e.at(dim + k) = 1;
    Polynomial r(dim);
    r.add_term(e, 1.0);
    return r;
}

Polynomial Polynomial::monomial(MultiIndex exps, double c) {
    if (exps.empty() || exps.size() % 2 != 0) throw ValidationError("multi-index needs 2d entries");
    Polynomial p(exps.size() / 2);
    p.add_term(exps, c);
    return p;
}

int Polynomial::degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) {
        int s = 0;
        for (int x : e) s += x;
        d = std::max(d, s);
    }
    return d;
}

double Polynomial::coefficient(const MultiIndex& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const MultiIndex& e, double c) {
    if (e.size() != nvars()) throw ShapeError("multi-index length does not match 2d");
    for (int x : e)
        if (x < 0) throw ValidationError("negative exponent");
    if (c == 0.0) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

double Polynomial::evaluate(std::span<const double> x) const {
    if (x.size() != nvars()) throw ShapeError("point has wrong number of coordinates");
    double s = 0.0;
    for (const auto& [e, c] : terms_) {
        double t = c;
        for (std::size_t v = 0; v < e.size(); ++v)
            for (int k = 0; k < e[v]; ++k) t *= x[v];
        s += t;
    }
    return s;
}

Polynomial Polynomial::derivative(std::size_t var) const {
    Polynomial r(dim_);
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) continue;
        MultiIndex f = e;
        f[var] -= 1;
        r.add_term(f, c * e[var]);
    }
    return r;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    if (o.dim_ != dim_) throw ShapeError("polynomial dimensions differ");
    Polynomial r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
    if (o.dim_ != dim_) throw ShapeError("polynomial dimensions differ");
    Polynomial r(dim_);
    for (const auto& [e1, c1] : terms_)
        for (const auto& [e2, c2] : o.terms_) {
            MultiIndex e = e1;
            for (std::size_t v = 0; v < e.size(); ++v) e[v] += e2[v];
            r.add_term(e, c1 * c2);
        }
    return r;
}

Polynomial Polynomial::operator*(double s) const {
    Polynomial r(dim_);
    for (const auto& [e, c] : terms_) r.add_term(e, c * s);
    return r;
}

// ---------------------------------------------------------- PolynomialGradient

PolynomialGradient::PolynomialGradient(const Polynomial& poly) : nvars_(poly.nvars()) {
    for (const auto& [e, c] : poly.terms()) value_terms_.push_back({e, c});
    partials_.resize(nvars_);
    for (std::size_t v = 0; v < nvars_; ++v) {
        const Polynomial d = poly.derivative(v);
        for (const auto& [e, c] : d.terms()) partials_[v].push_back({e, c});
    }
}

double PolynomialGradient::eval_terms(const std::vector<Term>& terms, std::span<const double> x) {
    double s = 0.0;
    for (const auto& t : terms) {
        double m = t.coeff;
        for (std::size_t v = 0; v < t.exps.size(); ++v)
            for (int k = 0; k < t.exps[v]; ++k) m *= x[v];
        s += m;
    }
    return s;
}

void PolynomialGradient::gradient(std::span<const double> x, std::span<double> out) const {
    for (std::size_t v = 0; v < nvars_; ++v) out[v] = eval_terms(partials_[v], x);
}

double PolynomialGradient::value(std::span<const double> x) const { return eval_terms(value_terms_, x); }

// ---------------------------------------------------------------- Observable

Observable::Observable(Polynomial poly) : kind_(Kind::polynomial), poly_(std::move(poly)) {}

Observable::Observable(PhaseGrid grid, std::vector<double> samples)
    : kind_(Kind::sampled), poly_(grid.dim()), grid_(std::move(grid)), samples_(std::move(samples)) {
    if (samples_.size() != grid_->size())
        throw ShapeError("sampled observable needs one value per grid node (" + std::to_string(grid_->size()) + ")");
    for (double v : samples_)
        if (!std::isfinite(v)) throw DomainError("sampled observable contains a non-finite value");
}

std::size_t Observable::dim() const { return is_polynomial() ? poly_.dim() : grid_->dim(); }

int Observable::degree() const {
    if (!is_polynomial()) throw UnsupportedError("degree is only defined for polynomial observables");
    return poly_.degree();
}

const Polynomial& Observable::polynomial() const {
    if (!is_polynomial()) throw UnsupportedError("observable is sampled, not polynomial");
    return poly_;
}

const PhaseGrid& Observable::grid() const {
    if (is_polynomial()) throw UnsupportedError("polynomial observable carries no grid");
    return *grid_;
}

const std::vector<double>& Observable::samples() const {
    if (is_polynomial()) throw UnsupportedError("polynomial observable carries no samples");
    return samples_;
}

double Observable::evaluate(std::span<const double> point) const {
    if (is_polynomial()) return poly_.evaluate(point);
    const long n = grid_->find_node(point);
    if (n < 0) throw DomainError("sampled observable evaluated off the grid nodes");
    return samples_[static_cast<std::size_t>(n)];
}

std::vector<double> Observable::sample_on(const PhaseGrid& grid) const {
    if (!is_polynomial()) {
        if (!(grid == *grid_)) throw ShapeError("sampled observable lives on a different grid");
        return samples_;
    }
    if (grid.dim() != poly_.dim()) throw ShapeError("grid dimension does not match observable");
    PolynomialGradient ev(poly_);
    std::vector<double> out(grid.size());
    std::vector<double> x(grid.rank());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.node(i, x);
        out[i] = ev.value(x);
    }
    return out;
}

// ------------------------------------------------- vector fields and brackets

std::vector<double> hamiltonian_vector_field(const Observable& f, std::span<const double> point) {
    const std::size_t d = f.dim();
    if (point.size() != 2 * d) throw ShapeError("point has wrong number of coordinates");
    std::vector<double> grad(2 * d);
    if (f.is_polynomial()) {
        PolynomialGradient(f.polynomial()).gradient(point, grad);
    } else {
        const PhaseGrid& g = f.grid();
        const long node = g.find_node(point);
        if (node < 0) throw DomainError("sampled observable: point is not a grid node");
        const auto idx = g.multi_index(static_cast<std::size_t>(node));
        const auto& s = f.samples();
        for (std::size_t a = 0; a < g.rank(); ++a) {
            const Axis& ax = g.axis(a);
            const long n = static_cast<long>(ax.count);
            const long i = static_cast<long>(idx[a]);
            if (g.periodic()) {
                grad[a] = sampled_derivative(g, s, a)[static_cast<std::size_t>(node)];
                continue;
            }
            if (i < 2 || i > n - 3)
                throw BoundaryError("centered difference needs two nodes on each side of the point (pad the grid)");
            auto at = [&](long off) {
                return s[static_cast<std::size_t>(node + off * static_cast<long>(g.stride(a)))];
            };
            grad[a] = (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * ax.spacing);
        }
    }
    std::vector<double> x(2 * d);
    for (std::size_t k = 0; k < d; ++k) {
        x[k] = grad[d + k];
        x[d + k] = -grad[k];
    }
    return x;
}

std::vector<std::vector<double>> hamiltonian_vector_field(const Observable& f, const PhaseGrid& grid) {
    const std::size_t d = grid.dim();
    if (f.dim() != d) throw ShapeError("grid dimension does not match observable");
    std::vector<std::vector<double>> grad(2 * d);
    if (f.is_polynomial()) {
        PolynomialGradient ev(f.polynomial());
        for (auto& g : grad) g.resize(grid.size());
        std::vector<double> x(2 * d), gr(2 * d);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            grid.node(i, x);
            ev.gradient(x, gr);
            for (std::size_t a = 0; a < 2 * d; ++a) grad[a][i] = gr[a];
        }
    } else {
        if (!(f.grid() == grid)) throw ShapeError("sampled observable lives on a different grid");
        for (std::size_t a = 0; a < 2 * d; ++a) grad[a] = sampled_derivative(grid, f.samples(), a);
    }
    std::vector<std::vector<double>> x(2 * d);
    for (std::size_t k = 0; k < d; ++k) {
        x[k] = std::move(grad[d + k]);
        x[d + k] = std::move(grad[k]);
        for (double& v : x[d + k]) v = -v;
    }
    return x;
}

Polynomial poisson_bracket(const Polynomial& f, const Polynomial& g) {
    if (f.dim() != g.dim()) throw ShapeError("polynomial dimensions differ");
    const std::size_t d = f.dim();
    Polynomial r(d);
    for (std::size_t k = 0; k < d; ++k)
        r = r + f.derivative(k) * g.derivative(d + k) - f.derivative(d + k) * g.derivative(k);
    return r;
}

Observable poisson_bracket(const Observable& f, const Observable& g) {
    if (f.is_polynomial() && g.is_polynomial()) return poisson_bracket(f.polynomial(), g.polynomial());
    if (f.is_polynomial() || g.is_polynomial())
        throw ShapeError("poisson bracket needs both observables polynomial or both sampled");
    if (!(f.grid() == g.grid())) throw ShapeError("sampled observables live on different grids");
    const PhaseGrid& grid = f.grid();
    const std::size_t d = grid.dim();
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t k = 0; k < d; ++k) {
        const auto fq = sampled_derivative(grid, f.samples(), k);
        const auto fp = sampled_derivative(grid, f.samples(), d + k);
        const auto gq = sampled_derivative(grid, g.samples(), k);
        const auto gp = sampled_derivative(grid, g.samples(), d + k);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += fq[i] * gp[i] - fp[i] * gq[i];
    }
    return Observable(grid, std::move(out));
}

// ---------------------------------------------------------------------- flows

FlowMap FlowMap::make(Observable h, double time, Integrator integrator, double step) {
    if (!h.is_polynomial()) throw UnsupportedError("flows need a polynomial Hamiltonian");
    if (integrator == Integrator::analytic_quadratic && h.degree() > 2)
        throw UnsupportedError("analytic_quadratic flow requires a Hamiltonian of degree <= 2 (got degree " +
                               std::to_string(h.degree()) + ")");
    if (integrator == Integrator::symplectic_leapfrog && !(step > 0.0))
        throw PreconditionError("leapfrog step must be positive");
    if (!std::isfinite(time)) throw ValidationError("flow time must be finite");
    return FlowMap{std::move(h), time, integrator, step};
}

FlowMap FlowMap::reversed() const { return FlowMap{hamiltonian, -time, integrator, step}; }

namespace {

Eigen::MatrixXd affine_generator(const Polynomial& h) {
    const std::size_t d = h.dim(), n = 2 * d;
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(static_cast<long>(n), static_cast<long>(n));
    Eigen::VectorXd g0 = Eigen::VectorXd::Zero(static_cast<long>(n));
    const std::vector<double> origin(n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
        const Polynomial da = h.derivative(a);
        g0[static_cast<long>(a)] = da.evaluate(origin);
        for (std::size_t b = 0; b < n; ++b) hess(static_cast<long>(a), static_cast<long>(b)) = da.derivative(b).evaluate(origin);
    }
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(static_cast<long>(n + 1), static_cast<long>(n + 1));
    const long ld = static_cast<long>(d);
    for (long k = 0; k < ld; ++k) {
        gen.row(k).head(static_cast<long>(n)) = hess.row(ld + k);
        gen(k, static_cast<long>(n)) = g0[ld + k];
        gen.row(ld + k).head(static_cast<long>(n)) = -hess.row(k);
        gen(ld + k, static_cast<long>(n)) = -g0[k];
    }
    return gen;
}

bool is_separable(const Polynomial& h) {
    const std::size_t d = h.dim();
    for (const auto& [e, c] : h.terms()) {
        bool has_q = false, has_p = false;
        for (std::size_t k = 0; k < d; ++k) {
            has_q |= e[k] > 0;
            has_p |= e[d + k] > 0;
        }
        if (has_q && has_p) return false;
    }
    return true;
}

}  // namespace

Flow::Flow(const FlowMap& map) : map_(map), dim_(map.hamiltonian.dim()) {
    const Polynomial& h = map_.hamiltonian.polynomial();
    if (map_.integrator == Integrator::analytic_quadratic) {
        if (h.degree() > 2) throw UnsupportedError("analytic_quadratic flow requires degree <= 2");
        const Eigen::MatrixXd gen = affine_generator(h);
        const long n = static_cast<long>(2 * dim_);
        generator_.assign(gen.data(), gen.data() + gen.size());
        const Eigen::MatrixXd e = (gen * map_.time).exp();
        lin_.resize(static_cast<std::size_t>(n * n));
        aff_.resize(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i) {
            for (long j = 0; j < n; ++j) lin_[static_cast<std::size_t>(i * n + j)] = e(i, j);
            aff_[static_cast<std::size_t>(i)] = e(i, n);
        }
    } else {
        separable_ = is_separable(h);
        grad_.emplace(h);
    }
}

void Flow::apply(std::span<double> x) const {
    if (map_.integrator == Integrator::analytic_quadratic) {
        const std::size_t n = 2 * dim_;
        double buf[16];
        std::vector<double> heap;
        double* y = buf;
        if (n > 16) {
            heap.resize(n);
            y = heap.data();
        }
        for (std::size_t i = 0; i < n; ++i) {
            double s = aff_[i];
            for (std::size_t j = 0; j < n; ++j) s += lin_[i * n + j] * x[j];
            y[i] = s;
        }
        std::copy(y, y + n, x.begin());
        return;
    }
    leapfrog(x, map_.time);
}

void Flow::advance(std::span<double> x, double t) const {
    if (map_.integrator == Integrator::analytic_quadratic) {
        const long n = static_cast<long>(2 * dim_);
        const Eigen::Map<const Eigen::MatrixXd> gen(generator_.data(), n + 1, n + 1);
        const Eigen::MatrixXd e = (gen * t).exp();
        Eigen::VectorXd z(n + 1);
        for (long i = 0; i < n; ++i) z[i] = x[static_cast<std::size_t>(i)];
        z[n] = 1.0;
        const Eigen::VectorXd r = e * z;
        for (long i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = r[i];
        return;
    }
    leapfrog(x, t);
}

void Flow::leapfrog(std::span<double> x, double t) const {
    if (t == 0.0) return;
    const std::size_t d = dim_, n = 2 * d;
    const auto steps = static_cast<long>(std::ceil(std::abs(t) / map_.step - 1e-9));
    const double dt = t / static_cast<double>(std::max(1L, steps));
    std::vector<double> g(n), mid(n), next(n);
    for (long s = 0; s < std::max(1L, steps); ++s) {
        if (separable_) {
            grad_->gradient(x, g);
            for (std::size_t k = 0; k < d; ++k) x[d + k] -= 0.5 * dt * g[k];
            grad_->gradient(x, g);
            for (std::size_t k = 0; k < d; ++k) x[k] += dt * g[d + k];
            grad_->gradient(x, g);
            for (std::size_t k = 0; k < d; ++k) x[d + k] -= 0.5 * dt * g[k];
            continue;
        }
        // implicit midpoint by fixed-point iteration
        std::copy(x.begin(), x.end(), next.begin());
        for (int it = 0; it < 200; ++it) {
            for (std::size_t a = 0; a < n; ++a) mid[a] = 0.5 * (x[a] + next[a]);
            grad_->gradient(mid, g);
            double change = 0.0, scale = 1.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double nq = x[k] + dt * g[d + k];
                const double np = x[d + k] - dt * g[k];
                change = std::max({change, std::abs(nq - next[k]), std::abs(np - next[d + k])});
                scale = std::max({scale, std::abs(nq), std::abs(np)});
                next[k] = nq;
                next[d + k] = np;
            }
            if (change <= 1e-15 * scale) break;
        }
        std::copy(next.begin(), next.end(), x.begin());
    }
}

std::vector<PhasePoint> flow(const FlowMap& map, const std::vector<PhasePoint>& points) {
    const Flow f(map);
    std::vector<PhasePoint> out = points;
    for (auto& p : out) {
        if (p.size() != 2 * map.hamiltonian.dim()) throw ShapeError("phase point has wrong number of coordinates");
        f.apply(p);
    }
    return out;
}

}  // namespace geoquant
