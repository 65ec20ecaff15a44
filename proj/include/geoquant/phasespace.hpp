#pragma once

// Classical phase space T*R^d with omega = sum_k dq_k ^ dp_k.
//
// Sign convention, shared by every module: i_{X_f} omega = df resolves to
//     X_f = sum_k (df/dp_k) d/dq_k - (df/dq_k) d/dp_k,
// so Hamilton's equations read qdot = dh/dp, pdot = -dh/dq, and
//     {f, g} = omega(X_f, X_g) = -L_{X_f} g = sum_k f_{q_k} g_{p_k} - f_{p_k} g_{q_k},
// giving {q, p} = +1.

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "geoquant/grid.hpp"

namespace geoquant {

/// Exponents over (q_1..q_d, p_1..p_d).
using MultiIndex = std::vector<int>;
using PhasePoint = std::vector<double>;

/// Sparse real polynomial in 2d phase-space variables. Zero coefficients are never stored.
class Polynomial {
public:
    explicit Polynomial(std::size_t dim = 1) : dim_(dim) {}

    static Polynomial constant(std::size_t dim, double c);
    static Polynomial q(std::size_t dim, std::size_t k = 0);
    static Polynomial p(std::size_t dim, std::size_t k = 0);
    static Polynomial monomial(MultiIndex exps, double c);

    std::size_t dim() const { return dim_; }
    std::size_t nvars() const { return 2 * dim_; }
    const std::map<MultiIndex, double>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    /// Maximum total degree of a stored term; 0 for the zero polynomial.
    int degree() const;
    double coefficient(const MultiIndex& e) const;

    void add_term(const MultiIndex& e, double c);
    double evaluate(std::span<const double> x) const;
    Polynomial derivative(std::size_t var) const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(double s) const;
    Polynomial operator-() const { return *this * -1.0; }
    bool operator==(const Polynomial& o) const { return dim_ == o.dim_ && terms_ == o.terms_; }

private:
    std::size_t dim_;
    std::map<MultiIndex, double> terms_;
};

inline Polynomial operator*(double s, const Polynomial& p) { return p * s; }

/// Gradient evaluator with pre-differentiated term lists, for hot loops.
class PolynomialGradient {
public:
    explicit PolynomialGradient(const Polynomial& poly);
    std::size_t nvars() const { return nvars_; }
    void gradient(std::span<const double> x, std::span<double> out) const;
    double value(std::span<const double> x) const;

private:
    struct Term {
        std::vector<int> exps;
        double coeff;
    };
    static double eval_terms(const std::vector<Term>& terms, std::span<const double> x);
    std::size_t nvars_;
    std::vector<Term> value_terms_;
    std::vector<std::vector<Term>> partials_;
};

/// A classical observable: an exact polynomial or samples on a PhaseGrid.
class Observable {
public:
    enum class Kind { polynomial, sampled };

    Observable(Polynomial poly);  // NOLINT: implicit by design of the algebra API
    Observable(PhaseGrid grid, std::vector<double> samples);

    Kind kind() const { return kind_; }
    bool is_polynomial() const { return kind_ == Kind::polynomial; }
    std::size_t dim() const;
    /// Total degree; only defined for the polynomial kind.
    int degree() const;
    const Polynomial& polynomial() const;
    const PhaseGrid& grid() const;
    const std::vector<double>& samples() const;

    /// Exact for polynomials; sampled observables are only defined at grid nodes.
    double evaluate(std::span<const double> point) const;
    /// Values at every node of `grid` (polynomials are evaluated, samples must live on `grid`).
    std::vector<double> sample_on(const PhaseGrid& grid) const;

private:
    Kind kind_;
    Polynomial poly_;
    std::optional<PhaseGrid> grid_;
    std::vector<double> samples_;
};

/// X_f at `point` (2d components ordered as the coordinates).
std::vector<double> hamiltonian_vector_field(const Observable& f, std::span<const double> point);

/// X_f at every node of `grid`, component-major: out[a][node].
std::vector<std::vector<double>> hamiltonian_vector_field(const Observable& f, const PhaseGrid& grid);

Polynomial poisson_bracket(const Polynomial& f, const Polynomial& g);
Observable poisson_bracket(const Observable& f, const Observable& g);

enum class Integrator { analytic_quadratic, symplectic_leapfrog };

/// Time-t Hamiltonian flow rho_t of a polynomial Hamiltonian.
struct FlowMap {
    Observable hamiltonian;
    double time = 0.0;
    Integrator integrator = Integrator::analytic_quadratic;
    double step = 1e-3;

    /// Validates the combination (analytic needs degree <= 2, leapfrog needs step > 0).
    static FlowMap make(Observable h, double time, Integrator integrator, double step = 1e-3);
    FlowMap reversed() const;
};

/// Hamiltonian flow evaluator. Quadratic Hamiltonians use the closed-form affine solution;
/// otherwise Stormer-Verlet for separable h = T(p) + V(q) and implicit midpoint for the rest.
class Flow {
public:
    explicit Flow(const FlowMap& map);
    /// Advance one point in place by the map's time.
    void apply(std::span<double> point) const;
    /// Advance one point by an arbitrary time using the same integrator.
    void advance(std::span<double> point, double t) const;

private:
    void leapfrog(std::span<double> x, double t) const;
    FlowMap map_;
    std::size_t dim_;
    bool separable_ = false;
    std::optional<PolynomialGradient> grad_;
    // affine solution z(t) = A z + b for the map's own time
    std::vector<double> lin_, aff_;
    std::vector<double> generator_;  // (2d+1)^2 augmented generator for other times
};

std::vector<PhasePoint> flow(const FlowMap& map, const std::vector<PhasePoint>& points);

}  // namespace geoquant
