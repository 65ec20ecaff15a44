#include "geoquant/su2.hpp"

#include <cmath>
#include <numbers>

#include "geoquant/error.hpp"

namespace geoquant {

namespace {

constexpr cplx i_unit{0.0, 1.0};

}  // namespace

Su2Point::Su2Point(cplx z0, cplx z1) {
    const double r = std::sqrt(std::norm(z0) + std::norm(z1));
    if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("SU(2) point needs a nonzero finite (z0, z1)");
    z0_ = z0 / r;
    z1_ = z1 / r;
}

Eigen::Matrix2cd Su2Point::matrix() const {
    Eigen::Matrix2cd m;
    m << z0_, z1_, -std::conj(z1_), std::conj(z0_);
    return m;
}

Su2Point Su2Point::from_matrix(const Eigen::Matrix2cd& m) { return {m(0, 0), m(0, 1)}; }

Eigen::Matrix2cd algebra_element(const Vec3& a) {
    Eigen::Matrix2cd x;
    x << a[0], cplx(a[1], -a[2]), cplx(a[1], a[2]), -a[0];
    return -0.5 * i_unit * x;
}

Vec3 lie_bracket(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Tangent4 invariant_field(FieldSide side, const Vec3& a, cplx z0, cplx z1) {
    const cplx m(a[1], -a[2]);  // a2 - i a3
    cplx w0, w1;
    if (side == FieldSide::right_Y) {
        w0 = -0.5 * i_unit * (a[0] * z0 - m * std::conj(z1));
        w1 = -0.5 * i_unit * (a[0] * z1 + m * std::conj(z0));
    } else {
        w0 = -0.5 * i_unit * (a[0] * z0 + std::conj(m) * z1);
        w1 = -0.5 * i_unit * (-a[0] * z1 + m * z0);
    }
    return {w0, w1, std::conj(w0), std::conj(w1)};
}

Tangent4 invariant_field(FieldSide side, const Vec3& a, const Su2Point& g) { return invariant_field(side, a, g.z0(), g.z1()); }

Weight::Weight(double l_) : l(l_), quantum_n(quantizable(l_)) {}

cplx theta_f(const Weight& w, const Su2Point& g, const Tangent4& v) {
    const cplx z0 = g.z0(), z1 = g.z1();
    const cplx constraint = std::conj(z0) * v[0] + std::conj(z1) * v[1] + z0 * v[2] + z1 * v[3];
    double scale = 0.0;
    for (const auto& c : v) scale = std::max(scale, std::abs(c));
    if (std::abs(constraint) > 1e-12 * std::max(1.0, scale))
        throw PreconditionError("tangent vector is not tangent to S^3");
    return i_unit * w.l * (z0 * v[2] + z1 * v[3] - std::conj(z0) * v[0] - std::conj(z1) * v[1]);
}

cplx character(const Weight& w, double t) { return std::exp(4.0 * std::numbers::pi * i_unit * w.l * t); }

std::optional<long> quantizable(double l, double tol) {
    const double x = 4.0 * std::numbers::pi * l;
    if (!std::isfinite(x)) return std::nullopt;
    const double n = std::round(x);
    if (std::abs(x - n) < tol) return static_cast<long>(n);
    return std::nullopt;
}

cplx S3Polynomial::evaluate(cplx z0, cplx z1) const {
    const std::array<cplx, 4> vars{z0, z1, std::conj(z0), std::conj(z1)};
    cplx s{};
    for (const auto& [e, c] : terms) {
        cplx m = c;
        for (std::size_t k = 0; k < 4; ++k)
            for (int r = 0; r < e[k]; ++r) m *= vars[k];
        s += m;
    }
    return s;
}

bool homogeneity_check(const S3Polynomial& poly, double l) {
    const double target = 4.0 * std::numbers::pi * l;
    for (const auto& [e, c] : poly.terms) {
        if (c == cplx{}) continue;
        const int diff = e[0] + e[1] - e[2] - e[3];
        if (std::abs(diff - target) >= 1e-9) return false;
    }
    return true;
}

InducedRep induced_rep(int n) {
    if (n < 0) throw ValidationError("induced representation needs n >= 0");
    const long d = n + 1;
    InducedRep rep;
    rep.n = n;
    for (auto& g : rep.generators) g = Eigen::MatrixXcd::Zero(d, d);
    // basis k <-> z0^p z1^q with p = n - k, q = k; column k holds the image of basis k
    for (long k = 0; k < d; ++k) {
        const double p = static_cast<double>(n - k), q = static_cast<double>(k);
        rep.generators[0](k, k) = -0.5 * i_unit * (p - q);
        // J_2: -(i/2)(p z0^{p-1} z1^{q+1} + q z0^{p+1} z1^{q-1})
        // J_3: (1/2)(p z0^{p-1} z1^{q+1} - q z0^{p+1} z1^{q-1})
        if (k + 1 < d) {
            rep.generators[1](k + 1, k) = -0.5 * i_unit * p;
            rep.generators[2](k + 1, k) = 0.5 * p;
        }
        if (k > 0) {
            rep.generators[1](k - 1, k) = -0.5 * i_unit * q;
            rep.generators[2](k - 1, k) = -0.5 * q;
        }
    }
    return rep;
}

Eigen::MatrixXcd InducedRep::casimir() const {
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(dimension(), dimension());
    for (const auto& j : generators) c -= j * j;
    return c;
}

std::vector<double> InducedRep::j1_eigenvalues() const {
    std::vector<double> ev;
    for (int k = n; k >= 0; --k) ev.push_back(0.5 * (n - 2 * k));
    return ev;
}

Eigen::MatrixXd InducedRep::gram() const {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dimension(), dimension());
    for (int k = 0; k <= n; ++k) {
        // (n-k)! k! / (n+1)! = 1 / ((n+1) * binom(n, k))
        double binom = 1.0;
        for (int r = 1; r <= k; ++r) binom = binom * (n - k + r) / r;
        g(k, k) = 1.0 / ((n + 1) * binom);
    }
    return g;
}

Eigen::VectorXcd InducedRep::translate(const Eigen::VectorXcd& c, const Su2Point& g) const {
    if (c.size() != dimension()) throw ShapeError("coefficient vector does not match the representation");
    const Eigen::Matrix2cd m = g.matrix();
    // first row of g' g is (A z0 + C z1, B z0 + D z1) in terms of the first row (z0, z1) of g'
    const cplx A = m(0, 0), B = m(0, 1), C = m(1, 0), D = m(1, 1);
    auto power = [](cplx lead, cplx tail, int e) {
        // (lead z0 + tail z1)^e as coefficients of z1^r, r = 0..e
        std::vector<cplx> poly{1.0};
        for (int s = 0; s < e; ++s) {
            std::vector<cplx> next(poly.size() + 1);
            for (std::size_t r = 0; r < poly.size(); ++r) {
                next[r] += lead * poly[r];
                next[r + 1] += tail * poly[r];
            }
            poly = std::move(next);
        }
        return poly;
    };
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dimension());
    for (int k = 0; k <= n; ++k) {
        if (c[k] == cplx{}) continue;
        const auto a = power(A, C, n - k), b = power(B, D, k);
        for (std::size_t r = 0; r < a.size(); ++r)
            for (std::size_t s = 0; s < b.size(); ++s) out[static_cast<long>(r + s)] += c[k] * a[r] * b[s];
    }
    return out;
}

}  // namespace geoquant
