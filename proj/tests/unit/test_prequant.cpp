#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "geoquant/constants.hpp"
#include "geoquant/error.hpp"
#include "geoquant/prequant.hpp"

using namespace geoquant;

namespace {

constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

const Polynomial Q = Polynomial::q(1);
const Polynomial P = Polynomial::p(1);

PhaseGrid square_grid(std::size_t n, double half = 8.0) {
    return PhaseGrid::plane(Axis::periodic(-half, half, n), Axis::periodic(-half, half, n), true);
}

template <typename Fn>
GridSection section_from(const PhaseGrid& g, Fn&& fn, ConnectionPotential theta = {}) {
    std::vector<cplx> v(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto x = g.node(n);
        v[n] = fn(x[0], x[1]);
    }
    return GridSection(g, std::move(v), theta);
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double max_abs(const std::vector<cplx>& a) {
    double m = 0.0;
    for (auto v : a) m = std::max(m, std::abs(v));
    return m;
}

const ConnectionPotential all_forms[] = {ConnectionPotential::Form::q_dp, ConnectionPotential::Form::p_dq,
                                         ConnectionPotential::Form::symmetric};

}  // namespace

TEST_CASE("d theta = omega for every potential (finite-difference exterior derivative)") {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-2, 2);
    const double h = 1e-4;
    for (const auto& theta : all_forms) {
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> x(4), a(4), b(4);
            for (auto* v : {&x, &a, &b})
                for (auto& c : *v) c = u(rng);
            // for constant fields a, b: d theta(a, b) = a(theta(b)) - b(theta(a))
            auto shifted = [&](const std::vector<double>& dir, double s) {
                auto y = x;
                for (std::size_t k = 0; k < 4; ++k) y[k] += s * dir[k];
                return y;
            };
            const double da_tb = (theta.evaluate(shifted(a, h), b) - theta.evaluate(shifted(a, -h), b)) / (2 * h);
            const double db_ta = (theta.evaluate(shifted(b, h), a) - theta.evaluate(shifted(b, -h), a)) / (2 * h);
            const double omega = a[0] * b[2] - a[2] * b[0] + a[1] * b[3] - a[3] * b[1];
            CHECK(std::abs(da_tb - db_ta - omega) < 1e-8);
            // theta - theta_symmetric = dG
            double dg = 0.0;
            for (std::size_t k = 0; k < 4; ++k) {
                std::vector<double> e(4, 0.0);
                e[k] = 1.0;
                dg += (theta.gauge_function(shifted(e, h)) - theta.gauge_function(shifted(e, -h))) / (2 * h) * a[k];
            }
            const double diff = theta.evaluate(x, a) - ConnectionPotential().evaluate(x, a);
            CHECK(std::abs(diff - dg) < 1e-8);
        }
    }
    CHECK(ConnectionPotential::parse("p_dq").form() == ConnectionPotential::Form::p_dq);
    CHECK_THROWS_AS(ConnectionPotential::parse("pdq"), ValidationError);
}

TEST_CASE("inner product") {
    const auto unit = PhaseGrid::plane(Axis::periodic(0, 1, 16), Axis::periodic(0, 1, 32), true);
    const auto ones = section_from(unit, [](double, double) { return cplx(1.0); });
    CHECK(inner_product(ones, ones).real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(inner_product(ones, ones).imag() == 0.0);

    std::mt19937 rng(2);
    std::normal_distribution<double> nd;
    auto random = [&](double, double) { return cplx(nd(rng), nd(rng)); };
    const auto s1 = section_from(unit, random), s2 = section_from(unit, random);
    const cplx a = inner_product(s1, s2), b = inner_product(s2, s1);
    CHECK(std::abs(a - std::conj(b)) < 1e-14);
    CHECK(inner_product(s1, s1).real() > 0.0);

    // Gaussian exp(-(q^2+p^2)/2) has squared norm pi on a grid spanning +-8 widths
    const auto g = square_grid(256);
    const auto gauss = section_from(g, [](double q, double p) { return cplx(std::exp(-(q * q + p * p) / 2)); });
    CHECK(std::abs(inner_product(gauss, gauss).real() - pi) < 1e-8);

    CHECK_THROWS_AS(inner_product(gauss, gauss.regauged(ConnectionPotential::Form::q_dp)), ShapeError);
    CHECK_THROWS_AS(inner_product(gauss, s1), ShapeError);
}

TEST_CASE("gauge change is an exact phase and keeps the norm") {
    const auto g = square_grid(128);
    const auto s = section_from(g, [](double q, double p) { return cplx(std::exp(-(q * q + 2 * p * p) / 2), 0.1 * q); });
    const auto a = s.regauged(ConnectionPotential::Form::q_dp);
    const auto b = s.regauged(ConnectionPotential::Form::p_dq);
    CHECK(std::abs(a.norm() - s.norm()) < 1e-14 * s.norm());
    // theta_pdq = theta_qdp + d(-qp), so q_dp -> p_dq multiplies by exp(+2 pi i q p)
    for (std::size_t n = 0; n < g.size(); n += 97) {
        const auto x = g.node(n);
        CHECK(std::abs(b.values[n] - a.values[n] * std::exp(2.0 * pi * I * x[0] * x[1])) < 1e-13);
    }
    const auto back = b.regauged(ConnectionPotential::Form::symmetric);
    CHECK(max_diff(back.values, s.values) < 1e-14);
}

TEST_CASE("operator action: unit, linear observables, zero section") {
    const auto g = square_grid(256);
    for (const auto& theta : all_forms) {
        const auto s = section_from(g, [](double q, double p) { return cplx(std::exp(-(q * q + p * p) / 2), q * 0.01); }, theta);
        const auto one = apply_operator({Polynomial::constant(1, 1.0), theta}, s);
        CHECK(one.values == s.values);
        const auto zero = apply_operator({Q * Q * P, theta}, GridSection(g, std::vector<cplx>(g.size()), theta));
        CHECK(max_abs(zero.values) == 0.0);
    }

    // psi = exp(2 pi i q p) g(q) g(p) in the q_dp gauge: symbolic application gives
    //   q^ psi = -q psi - e g(q) g'(p) / (2 pi i),  p^ psi = 2 p psi + e g'(q) g(p) / (2 pi i)
    const ConnectionPotential qdp = ConnectionPotential::Form::q_dp;
    auto gq = [](double q) { return std::exp(-q * q); };
    auto dgq = [](double q) { return -2 * q * std::exp(-q * q); };
    const auto psi = section_from(g, [&](double q, double p) { return std::exp(2 * pi * I * q * p) * gq(q) * gq(p); }, qdp);
    const auto qpsi = apply_operator({Q, qdp}, psi);
    const auto ppsi = apply_operator({P, qdp}, psi);
    std::vector<cplx> want_q(g.size()), want_p(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto x = g.node(n);
        const cplx e = std::exp(2 * pi * I * x[0] * x[1]);
        want_q[n] = -x[0] * psi.values[n] - e * gq(x[0]) * dgq(x[1]) / (2 * pi * I);
        want_p[n] = 2 * x[1] * psi.values[n] + e * dgq(x[0]) * gq(x[1]) / (2 * pi * I);
    }
    CHECK(max_diff(qpsi.values, want_q) < 1e-9);
    CHECK(max_diff(ppsi.values, want_p) < 1e-9);

    CHECK_THROWS_AS(apply_operator({Q, ConnectionPotential::Form::p_dq}, psi), ShapeError);
}

TEST_CASE("real observables give real expectation values") {
    const auto g = square_grid(128);
    for (const auto& theta : all_forms) {
        const auto s = section_from(g, [](double q, double p) {
            return std::exp(-((q - 0.5) * (q - 0.5) + p * p) / 2) * std::exp(I * (0.3 * q + 0.2 * p * p));
        }, theta);
        const auto e = inner_product(apply_operator({Q * Q * P + P - 0.5 * Q * Q, theta}, s), s);
        CHECK(std::abs(e.imag()) < 1e-8 * std::abs(e));
    }
}

TEST_CASE("Dirac commutator defect") {
    const auto g = square_grid(256);
    const auto s = section_from(g, [](double q, double p) { return cplx(std::exp(-(q * q + p * p) / 2)); });
    CHECK(commutator_defect(Q, P, s) < 1e-8);
    const Observable f = Q * Q * P + P;
    CHECK(commutator_defect(f, f, s) == 0.0);
    CHECK(commutator_defect(Q * Q, P * P, s) < 1e-6);
    CHECK(commutator_defect(Q * Q * Q, P * Q, s) < 1e-6);
    CHECK_THROWS_AS(commutator_defect(Q * Q * Q * Q, P, s), PreconditionError);
}

TEST_CASE("gauge covariance of operators, inner products and defects") {
    const auto g = square_grid(128);
    const auto s1 = section_from(g, [](double q, double p) { return cplx(std::exp(-(q * q + p * p) / 2)); });
    const auto s2 = section_from(g, [](double q, double p) { return std::exp(-((q - 1) * (q - 1) + p * p) / 2) * std::exp(0.5 * I * p); });
    const Observable f = Q * Q + 0.5 * Q * P - P;
    const auto base = apply_operator({f, ConnectionPotential()}, s1);
    for (const auto& theta : all_forms) {
        const auto a = s1.regauged(theta), b = s2.regauged(theta);
        CHECK(std::abs(inner_product(a, b) - inner_product(s1, s2)) < 1e-8);
        const auto fa = apply_operator({f, theta}, a);
        CHECK(max_diff(fa.values, base.regauged(theta).values) < 1e-8);
        CHECK(std::abs(commutator_defect(Q * Q, P * Q, a) - commutator_defect(Q * Q, P * Q, s1)) < 1e-8);
    }
}

TEST_CASE("sampled observables on open grids need a clear boundary band") {
    const auto g = PhaseGrid::plane(Axis::closed(-8, 8, 128), Axis::closed(-8, 8, 128), false);
    std::vector<double> fs(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto x = g.node(n);
        fs[n] = x[0] * x[0] + x[1];
    }
    const Observable f(g, fs);
    const auto inside = section_from(g, [](double q, double p) { return cplx(std::exp(-(q * q + p * p) / 2)); });
    const auto sampled = apply_operator({f, ConnectionPotential()}, inside);
    const auto exact = apply_operator({Q * Q + P, ConnectionPotential()}, inside);
    CHECK(max_diff(sampled.values, exact.values) < 1e-6);
    const auto wide = section_from(g, [](double q, double p) { return cplx(std::exp(-(q * q + p * p) / 50)); });
    CHECK_THROWS_AS(apply_operator({f, ConnectionPotential()}, wide), BoundaryError);
}

TEST_CASE("holonomy") {
    CHECK(holonomy(ConnectionPotential::Form::p_dq, {{0.3, 0.4}}) == cplx(1.0));
    auto circle = [](double area, int n, bool ccw) {
        const double r = std::sqrt(area / pi);
        std::vector<PhasePoint> pts;
        for (int k = 0; k <= n; ++k) {
            const double a = 2 * pi * (k % n) / n * (ccw ? 1 : -1);
            pts.push_back({r * std::cos(a), r * std::sin(a)});
        }
        return pts;
    };
    const int n = 1 << 14;
    for (const auto& theta : all_forms) {
        CHECK(std::abs(holonomy(theta, circle(1.0, n, true)) - 1.0) < 1e-6);
        CHECK(std::abs(holonomy(theta, circle(0.5, n, true)) + 1.0) < 1e-6);
        // quarter action: counterclockwise encloses +area
        CHECK(std::abs(holonomy(theta, circle(0.25, n, true)) - I) < 1e-6);
        CHECK(std::abs(holonomy(theta, circle(0.25, n, false)) + I) < 1e-6);
    }
    const std::vector<PhasePoint> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
    CHECK(holonomy(ConnectionPotential::Form::q_dp, square) == cplx(1.0));
    CHECK_THROWS_AS(holonomy(ConnectionPotential::Form::q_dp, {{0, 0}, {1, 0}, {1, 1}}), PreconditionError);

    // concatenation at a shared base point multiplies holonomies
    const std::vector<PhasePoint> a{{0, 0}, {0.3, 0}, {0.3, 0.2}, {0, 0}};
    const std::vector<PhasePoint> b{{0, 0}, {-0.1, 0.5}, {-0.4, -0.2}, {0, 0}};
    std::vector<PhasePoint> ab = a;
    ab.insert(ab.end(), b.begin() + 1, b.end());
    for (const auto& theta : all_forms)
        CHECK(std::abs(holonomy(theta, ab) - holonomy(theta, a) * holonomy(theta, b)) < 1e-14);
}

TEST_CASE("evolution: identity, period return, half-period reflection") {
    const auto g = square_grid(64, 10.0);
    const Observable h = 0.5 * (Q * Q + P * P);
    for (const auto& theta : all_forms) {
        const auto s = section_from(g, [](double q, double p) { return cplx(std::exp(-((q - 2) * (q - 2) + p * p) / 2)); })
                           .regauged(theta);
        CHECK(evolve(h, 0.0, s).values == s.values);
        const auto full = evolve(h, 2 * pi, s);
        CHECK(std::abs(full.norm() - s.norm()) < 1e-6 * s.norm());
        const cplx overlap = inner_product(full, s) / inner_product(s, s);
        CHECK(std::abs(overlap - 1.0) < 1e-6);  // global phase exp(-2 pi i * 0)
        if (theta == ConnectionPotential()) {
            // L = theta(X_h) + h vanishes in the symmetric gauge: pure transport psi(-x)
            const auto half = evolve(h, pi, s);
            const auto mirrored = section_from(g, [](double q, double p) { return cplx(std::exp(-((q + 2) * (q + 2) + p * p) / 2)); });
            CHECK(max_diff(half.values, mirrored.values) < 1e-8);
        }
    }
}

TEST_CASE("evolution obeys i hbar d/dt U_t psi = U_t h^ psi") {
    const auto g = square_grid(128);
    const Observable h = 0.5 * (Q * Q + P * P) + 0.3 * Q;
    for (const auto& theta : all_forms) {
        const auto psi = section_from(g, [](double q, double p) {
            return std::exp(-((q - 0.5) * (q - 0.5) + p * p)) * std::exp(I * 0.4 * q);
        }).regauged(theta);
        const double eps = 1e-4;
        for (double t0 : {0.0, 0.7}) {
            const auto base = evolve(h, t0, psi, 400);
            const auto plus = evolve(h, eps, base), minus = evolve(h, -eps, base);
            const auto rhs = evolve(h, t0, apply_operator({h, theta}, psi), 400);
            std::vector<cplx> lhs(g.size()), want(g.size());
            for (std::size_t n = 0; n < g.size(); ++n) {
                lhs[n] = I * hbar * (plus.values[n] - minus.values[n]) / (2 * eps);
                want[n] = rhs.values[n];
            }
            CHECK(max_diff(lhs, want) < 1e-5 * max_abs(want));
        }
    }
}

TEST_CASE("evolution domain and step preconditions") {
    const auto open = PhaseGrid::plane(Axis::closed(-4, 4, 32), Axis::closed(-4, 4, 32), false);
    const auto s = section_from(open, [](double q, double p) { return cplx(std::exp(-(q * q + p * p))); });
    CHECK_THROWS_AS(evolve(0.5 * P * P, 1.0, s), OutOfDomainError);
    const Observable quartic = 0.5 * P * P + 0.25 * Q * Q * Q * Q;
    CHECK_THROWS_AS(evolve(quartic, 1.0, s, 64), PreconditionError);
    const auto torus = square_grid(32, 4.0);
    const auto st = section_from(torus, [](double q, double p) { return cplx(std::exp(-(q * q + p * p))); });
    const auto moved = evolve(quartic, 0.05, st, 50);
    CHECK(std::abs(moved.norm() - st.norm()) < 1e-3 * st.norm());
}
