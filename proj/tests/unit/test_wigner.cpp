#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "geoquant/bws.hpp"
#include "geoquant/constants.hpp"
#include "geoquant/error.hpp"
#include "geoquant/wigner.hpp"

using namespace geoquant;

namespace {

constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

const Polynomial Q = Polynomial::q(1);
const Polynomial P = Polynomial::p(1);

struct Packet {
    double q0, p0, w, sigma;

    cplx operator()(double q) const {
        return std::pow(pi * w * w, -0.25) * std::exp(-(q - q0) * (q - q0) / (2 * w * w) + I * p0 * (q - q0) / sigma);
    }
    // closed-form Wigner function of the packet
    double wigner(double q, double p) const {
        return std::exp(-(q - q0) * (q - q0) / (w * w) - w * w * (p - p0) * (p - p0) / (sigma * sigma)) / (pi * sigma);
    }
};

WaveFunction sample(const Axis& q, double sigma, const std::function<cplx(double)>& fn) {
    std::vector<cplx> v(q.count);
    for (std::size_t i = 0; i < q.count; ++i) v[i] = fn(q[i]);
    return WaveFunction(q, std::move(v), sigma);
}

double sup_diff(const PhaseDistribution& f, const std::function<double(double, double)>& g) {
    double m = 0.0;
    for (std::size_t n = 0; n < f.grid.size(); ++n) {
        const auto x = f.grid.node(n);
        m = std::max(m, std::abs(f.values[n] - g(x[0], x[1])));
    }
    return m;
}

// Colbert-Miller sinc discretization of -(hbar^2 / 2m) d^2/dq^2 + V on a uniform grid.
Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> grid_hamiltonian(const std::function<double(double)>& V, double lo, double hi,
                                                                 int n, double mass = 1.0) {
    const double d = (hi - lo) / (n - 1);
    const double c = hbar * hbar / (2 * mass * d * d);
    Eigen::MatrixXd H(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            H(i, j) = i == j ? c * pi * pi / 3 + V(lo + i * d) : c * 2.0 * ((i - j) % 2 ? -1.0 : 1.0) / ((i - j) * (i - j));
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H);
}

const Axis q256 = Axis::periodic(-8.0, 8.0, 256);
const double sigma0 = 1.0 / (2 * pi);

}  // namespace

TEST_CASE("Gaussian Wigner function against the closed form") {
    const Packet g{1.0, -0.7, 0.5, sigma0};
    const auto psi = sample(q256, sigma0, g);
    const Axis p = conjugate_p_axis(q256, sigma0, 256);
    const auto f = wigner_transform(psi, p);
    CHECK(f.provenance == Provenance::wigner);
    CHECK(sup_diff(f, [&](double q, double pp) { return g.wigner(q, pp); }) < 1e-6);
    CHECK(std::abs(f.integral() - psi.norm_squared()) < 1e-8);
    CHECK(std::abs(f.particle_number - 1.0) < 1e-8);
    CHECK(std::abs(overlap(f, f) - 1.0 / (2 * pi * sigma0)) < 1e-6);
}

TEST_CASE("marginals") {
    const double sigma = 0.3;
    const Axis q = Axis::periodic(-10.0, 10.0, 256);
    // a non-Gaussian state: superposition of two packets
    const Packet a{-2.0, 0.5, 0.8, sigma}, b{1.5, -1.0, 0.6, sigma};
    const auto psi = sample(q, sigma, [&](double x) { return a(x) + 0.6 * I * b(x); });
    const Axis p = conjugate_p_axis(q, sigma, 256);
    const auto f = wigner_transform(psi, p);
    const auto mq = f.q_marginal();
    double dq = 0.0;
    for (std::size_t i = 0; i < q.count; ++i) dq = std::max(dq, std::abs(mq[i] - std::norm(psi.values[i])));
    CHECK(dq < 1e-6);
    const auto mp = f.p_marginal();
    double dp = 0.0;
    for (std::size_t l = 0; l < p.count; ++l) {
        cplx amp{};
        for (std::size_t i = 0; i < q.count; ++i) amp += std::exp(-I * p[l] * q[i] / sigma) * psi.values[i] * q.spacing;
        dp = std::max(dp, std::abs(mp[l] - std::norm(amp) / (2 * pi * sigma)));
    }
    CHECK(dp < 1e-6);
}

TEST_CASE("sesquilinearity, Galilei covariance, overlaps") {
    const Axis p = conjugate_p_axis(q256, sigma0, 256);
    const Packet g{0.5, 0.0, 0.45, sigma0};
    const auto psi = sample(q256, sigma0, g);
    const auto f = wigner_transform(psi, p);
    const cplx alpha{0.3, -1.2};
    const auto scaled = wigner_transform(sample(q256, sigma0, [&](double x) { return alpha * g(x); }), p);
    double m = 0.0;
    for (std::size_t n = 0; n < f.values.size(); ++n) m = std::max(m, std::abs(scaled.values[n] - std::norm(alpha) * f.values[n]));
    CHECK(m < 1e-12);

    // e^{i p0 q / sigma} with p0 a whole number of p cells translates by that many cells
    const int cells = 12;
    const double p0 = cells * p.spacing;
    const auto boosted = wigner_transform(sample(q256, sigma0, [&](double x) { return g(x) * std::exp(I * p0 * x / sigma0); }), p);
    double shift_err = 0.0;
    for (std::size_t i = 0; i < q256.count; ++i)
        for (std::size_t l = cells; l < p.count; ++l)
            shift_err = std::max(shift_err, std::abs(boosted.values[i * p.count + l] - f.values[i * p.count + l - cells]));
    CHECK(shift_err < 1e-10);

    // even / odd pair
    const auto odd = sample(q256, sigma0, [&](double x) { return (x - 0.5) * g(x); });
    const auto fo = wigner_transform(odd, p);
    CHECK(std::abs(overlap(f, fo)) < 1e-8);
    CHECK(std::abs(overlap(f, fo) - overlap(fo, f)) < 1e-15);

    // overlap identity and Cauchy-Schwarz for a non-orthogonal pair
    const auto other = sample(q256, sigma0, Packet{1.0, 0.3, 0.6, sigma0});
    const auto fb = wigner_transform(other, p);
    CHECK(std::abs(overlap(f, fb) - std::norm(psi.inner(other)) / (2 * pi * sigma0)) < 1e-6);
    CHECK(overlap(f, f) * overlap(fb, fb) >= overlap(f, fb) * overlap(f, fb));
    const PhaseDistribution sum(f.grid, [&] {
        std::vector<double> v(f.values.size());
        for (std::size_t n = 0; n < v.size(); ++n) v[n] = 2.0 * f.values[n] + fb.values[n];
        return v;
    }());
    CHECK(std::abs(overlap(sum, fo) - (2.0 * overlap(f, fo) + overlap(fb, fo))) < 1e-12);
}

TEST_CASE("aliasing and shape errors") {
    const auto psi = sample(q256, sigma0, Packet{0, 0, 0.5, sigma0});
    const Axis narrow = Axis::periodic(-4.0, 4.0, 256);
    CHECK_THROWS_AS(wigner_transform(psi, narrow), AliasingError);
    try {
        wigner_transform(psi, narrow);
    } catch (const AliasingError& e) {
        CHECK(std::string(e.what()).find("required") != std::string::npos);
    }
    CHECK_THROWS_AS(wigner_transform(psi, Axis::periodic(-7.0, 9.0, 256)), AliasingError);
    const auto f = wigner_transform(psi, conjugate_p_axis(q256, sigma0, 256));
    const auto g = wigner_transform(psi, conjugate_p_axis(q256, sigma0, 512));
    CHECK_THROWS_AS(overlap(f, g), ShapeError);
    CHECK_THROWS_AS(WaveFunction(Axis::periodic(0, 1, 100), std::vector<cplx>(100), 0.1), ValidationError);
}

TEST_CASE("first moment of a WKB-form state is dS/dq") {
    const double sigma = 0.05;
    const Axis q = Axis::periodic(-8.0, 8.0, 512);
    const Axis p = conjugate_p_axis(q, sigma, 512);
    auto n = [](double x) { return std::exp(-x * x / 2.0); };
    auto S = [](double x) { return 0.2 * x * x + 0.1 * x; };
    const auto psi = sample(q, sigma, [&](double x) { return std::sqrt(n(x)) * std::exp(I * S(x) / sigma); });
    const auto f = wigner_transform(psi, p);
    for (std::size_t i = 0; i < q.count; ++i) {
        if (std::abs(q[i]) > 2.5) continue;
        double m0 = 0.0, m1 = 0.0;
        for (std::size_t l = 0; l < p.count; ++l) {
            m0 += f.values[i * p.count + l] * p.spacing;
            m1 += p[l] * f.values[i * p.count + l] * p.spacing;
        }
        CHECK(std::abs(m1 / m0 - (0.4 * q[i] + 0.1)) < 1e-4);
    }
}

TEST_CASE("action distributions") {
    const Axis q = Axis::periodic(-8.0, 8.0, 128);
    const Axis p = Axis::periodic(-4.0, 4.0, 128);
    const int cells = 10;
    const double p0 = cells * p.spacing;
    std::vector<double> n(q.count, 0.25), S(q.count), zero(q.count, 0.0);
    for (std::size_t i = 0; i < q.count; ++i) S[i] = p0 * q[i];
    const auto f = action_distribution(q, n, S, p);
    CHECK(f.provenance == Provenance::action);
    CHECK(std::abs(f.integral() - 0.25 * 16.0) < 1e-12);
    for (std::size_t i = 0; i < q.count; ++i)
        for (std::size_t l = 0; l < p.count; ++l) {
            const double expected = l == p.count / 2 + cells ? 0.25 / p.spacing : 0.0;
            CHECK(std::abs(f.values[i * p.count + l] - expected) < 1e-12);
        }
    const auto f0 = action_distribution(q, n, zero, p);
    CHECK(std::abs(f0.values[5 * p.count + p.count / 2] - 0.25 / p.spacing) < 1e-12);
    n[3] = -1e-3;
    CHECK_THROWS_AS(action_distribution(q, n, S, p), DomainError);
}

TEST_CASE("mixed overlap of a packet with an action sheet") {
    const Axis p = conjugate_p_axis(q256, sigma0, 256);
    const Packet g{0.3, 0.5, 0.5, sigma0};
    const auto fpsi = wigner_transform(sample(q256, sigma0, g), p);
    const double pc = p[p.count / 2 + 8];
    std::vector<double> n(q256.count), S(q256.count);
    auto density = [](double x) { return std::exp(-x * x / 4.0); };
    for (std::size_t i = 0; i < q256.count; ++i) {
        n[i] = density(q256[i]);
        S[i] = pc * q256[i];
    }
    const auto f0 = action_distribution(q256, n, S, p);
    const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double x) { return density(x) * g.wigner(x, pc); }, -8.0, 8.0, 15, 1e-14);
    CHECK(std::abs(overlap(fpsi, f0) - oracle) < 1e-6);
}

TEST_CASE("split-step Schrodinger propagation") {
    const double sigma = 0.2, w = 0.7;
    const Axis q = Axis::periodic(-12.0, 12.0, 256);
    const auto psi = sample(q, sigma, Packet{0.0, 0.0, w, sigma});
    const Observable zero(Polynomial(1));
    CHECK(evolve_schrodinger(psi, zero, 0.0, 10).values == psi.values);
    // free packet closed form
    const double t = 3.0;
    const auto free = evolve_schrodinger(psi, zero, t, 50);
    const cplx a = 1.0 + I * sigma * t / (w * w);
    double err = 0.0;
    for (std::size_t i = 0; i < q.count; ++i) {
        const cplx exact = std::pow(pi * w * w, -0.25) / std::sqrt(a) * std::exp(-q[i] * q[i] / (2 * w * w * a));
        err = std::max(err, std::abs(free.values[i] - exact));
    }
    CHECK(err < 1e-6);
    // coherent state returns after one period of V = q^2 / 2
    const Observable harmonic(Q * Q * 0.5);
    const auto shifted = sample(q, sigma, Packet{2.0, 0.5, std::sqrt(sigma), sigma});
    const auto back = evolve_schrodinger(shifted, harmonic, 2 * pi, 20000);
    double modulus = 0.0;
    for (std::size_t i = 0; i < q.count; ++i) modulus = std::max(modulus, std::abs(std::abs(back.values[i]) - std::abs(shifted.values[i])));
    CHECK(modulus < 1e-6);
    // unitarity over 10^4 steps in an anharmonic potential
    const auto long_run = evolve_schrodinger(shifted, Observable(Q * Q * Q * Q * 0.05 + Q * Q * 0.5), 5.0, 10000);
    CHECK(std::abs(long_run.norm_squared() - shifted.norm_squared()) < 1e-10);
    CHECK_THROWS_AS(evolve_schrodinger(psi, Observable(P * P), 1.0, 10), ValidationError);
}

TEST_CASE("Liouville transport") {
    const Axis q = Axis::periodic(-10.0, 10.0, 256);
    const Axis p = Axis::periodic(-10.0, 10.0, 256);
    const PhaseGrid grid = PhaseGrid::plane(q, p, true);
    // squeezed, correlated, displaced Gaussian
    const double sq = 1.0, sp = 1.3, rho = 0.3, mq = 1.0, mp = -0.5;
    auto gauss = [&](double x, double y) {
        const double u = (x - mq) / sq, v = (y - mp) / sp;
        return std::exp(-(u * u - 2 * rho * u * v + v * v) / (2 * (1 - rho * rho))) / (2 * pi * sq * sp * std::sqrt(1 - rho * rho));
    };
    std::vector<double> v(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const auto x = grid.node(n);
        v[n] = gauss(x[0], x[1]);
    }
    const PhaseDistribution f(grid, v);
    const Observable rot(mechanical_hamiltonian(Observable(Q * Q * 0.5)));
    CHECK(evolve_liouville(f, rot, 0.0).values == f.values);

    const double t = 0.9;
    const auto g = evolve_liouville(f, rot, t);
    CHECK(std::abs(g.integral() - f.integral()) < 1e-6);
    // moments rotate: (q, p) -> (q cos t + p sin t, -q sin t + p cos t)
    double m[5] = {0, 0, 0, 0, 0};
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const auto x = grid.node(n);
        const double w = g.values[n] * grid.cell_volume();
        m[0] += w * x[0];
        m[1] += w * x[1];
        m[2] += w * x[0] * x[0];
        m[3] += w * x[0] * x[1];
        m[4] += w * x[1] * x[1];
    }
    const double c = std::cos(t), s = std::sin(t);
    Eigen::Matrix2d cov0, R;
    cov0 << sq * sq, rho * sq * sp, rho * sq * sp, sp * sp;
    R << c, s, -s, c;
    const Eigen::Matrix2d cov = R * cov0 * R.transpose();
    const Eigen::Vector2d mean = R * Eigen::Vector2d(mq, mp);
    CHECK(std::abs(m[0] - mean[0]) < 1e-6);
    CHECK(std::abs(m[1] - mean[1]) < 1e-6);
    CHECK(std::abs(m[2] - m[0] * m[0] - cov(0, 0)) < 1e-6);
    CHECK(std::abs(m[3] - m[0] * m[1] - cov(0, 1)) < 1e-6);
    CHECK(std::abs(m[4] - m[1] * m[1] - cov(1, 1)) < 1e-6);

    // free shear q -> q + p t
    const Observable free(mechanical_hamiltonian(Observable(Polynomial(1))));
    const auto sheared = evolve_liouville(f, free, 1.0);
    CHECK(sup_diff(sheared, [&](double x, double y) { return gauss(x - y, y); }) < 1e-6);

    // leapfrog path for a quartic matches a fine reference
    const Observable quartic(mechanical_hamiltonian(Observable(Q * Q * Q * Q * 0.02 + Q * Q * 0.5)));
    const auto coarse = evolve_liouville(f, quartic, 0.5, 1e-2), fine = evolve_liouville(f, quartic, 0.5, 1e-3);
    CHECK(l1_distance(coarse, fine) < 1e-4);
    CHECK(std::abs(coarse.integral() - f.integral()) < 1e-6);

    // a distribution filling the window cannot be transported off it
    const PhaseDistribution flat(grid, std::vector<double>(grid.size(), 1.0));
    CHECK_THROWS_AS(evolve_liouville(flat, free, 0.5), OutOfDomainError);
}

TEST_CASE("f-coherence: quadratic potentials are coherent, the quartic is not") {
    const Axis q = Axis::periodic(-8.0, 8.0, 128);
    const auto psi0 = sample(q, sigma0, Packet{1.5, 0.0, std::sqrt(sigma0), sigma0});
    const CoherenceOptions opts{1.0, 400.0, 1e-2};
    const auto harmonic = coherence_experiment(psi0, Observable(Q * Q * 0.5), 2 * pi, 4, opts);
    const auto quartic = coherence_experiment(psi0, Observable(Q * Q * Q * Q * 0.25), 2 * pi, 4, opts);
    REQUIRE(harmonic.times.size() == 5);
    CHECK(harmonic.deviations[0] < 1e-12);
    CHECK(harmonic.max_deviation() < 1e-2);
    CHECK(quartic.max_deviation() > 10 * harmonic.max_deviation());
}

TEST_CASE("sigma -> 0: Wigner functions approach the action distribution") {
    const Axis q = Axis::periodic(-8.0, 8.0, 512);
    const Axis p = conjugate_p_axis(q, 0.2, 512);
    std::vector<double> n(q.count), S(q.count);
    for (std::size_t i = 0; i < q.count; ++i) {
        n[i] = std::exp(-q[i] * q[i] / 0.5) / std::sqrt(0.5 * pi);
        S[i] = 0.1 * q[i] * q[i] + 0.1 * q[i];
    }
    const auto d = sigma_limit_experiment(q, n, S, p, {0.2, 0.1, 0.05, 0.025, 0.0125});
    REQUIRE(d.size() == 5);
    for (std::size_t k = 1; k < d.size(); ++k) CHECK(d[k] < d[k - 1]);
    CHECK_THROWS_AS(sigma_limit_experiment(q, n, S, p, {0.001}), AliasingError);
}

TEST_CASE("WKB construction") {
    // free plane wave: an exact momentum eigenfunction
    const Axis q = Axis::periodic(-4.0, 4.0, 128);
    const double pm = 1.5;  // p L = 12
    const auto free = wkb_build(Observable(Polynomial(1)), 0.5 * pm * pm, 1.0, q);
    CHECK(free.solution.q.size() == q.count);
    const cplx step = std::exp(I * pm * q.spacing / hbar);
    for (std::size_t i = 0; i + 1 < q.count; ++i) CHECK(std::abs(free.psi.values[i + 1] - step * free.psi.values[i]) < 1e-10);
    CHECK(std::abs(free.psi.norm_squared() - 1.0) < 1e-12);

    // harmonic well at a BWS level
    const Observable V(Q * Q * 0.5);
    const Observable h(mechanical_hamiltonian(V));
    const int n = 20;
    const double E = bws_levels(h, n).levels.at(n);
    const Axis fine = Axis::periodic(-4.0, 4.0, 1024);
    const auto wkb = wkb_build(V, E, 1.0, fine);
    const auto& sol = wkb.solution;
    for (std::size_t k = 0; k < sol.q.size(); ++k) {
        CHECK(std::abs(sol.dS[k] * sol.dS[k] / 2 + 0.5 * sol.q[k] * sol.q[k] - E) < 1e-8);
        CHECK(std::abs(sol.A[k] * sol.A[k] * sol.dS[k] - sol.A[0] * sol.A[0] * sol.dS[0]) < 1e-6);
    }
    // envelope of the exact eigenfunction from the sinc-grid eigensolver
    const double lo = -4.0, hi = 4.0;
    const int m = 801;
    const auto es = grid_hamiltonian([](double x) { return 0.5 * x * x; }, lo, hi, m);
    CHECK(std::abs(es.eigenvalues()[n] - (n + 0.5) / (2 * pi)) < 1e-10);
    const Eigen::VectorXd u = es.eigenvectors().col(n);
    const double dx = (hi - lo) / (m - 1);
    const double qt = std::sqrt(2 * E);
    std::vector<double> ratio;
    for (int i = 1; i + 1 < m; ++i) {
        const double x = lo + i * dx;
        if (std::abs(x) > 0.6 * qt) continue;
        const double du = (u[i + 1] - u[i - 1]) / (2 * dx);
        const double ps = std::sqrt(2 * E - x * x);
        const double envelope = std::sqrt(u[i] * u[i] + du * du / (2 * pi * ps) / (2 * pi * ps));
        const double a = 1.0 / std::sqrt(ps);
        ratio.push_back(envelope / a);
    }
    std::sort(ratio.begin(), ratio.end());
    const double median = ratio[ratio.size() / 2];
    CHECK(std::abs(ratio.front() / median - 1.0) < 0.05);
    CHECK(std::abs(ratio.back() / median - 1.0) < 0.05);

    CHECK_THROWS_AS(wkb_build(Observable(Q * Q * -1.0), 1.0, 1.0, fine), DomainError);
    CHECK_THROWS_AS(wkb_build(V, -0.1, 1.0, fine), DomainError);
    CHECK_THROWS_AS(wkb_build(Observable(Q * Q - Q * Q * Q), 1.0, 1.0, fine), RangeError);
}

TEST_CASE("quartic BWS levels are bracketed by exact eigenvalues") {
    const auto es = grid_hamiltonian([](double x) { return 0.25 * x * x * x * x; }, -4.0, 4.0, 601);
    const auto lv = bws_levels(Observable(P * P * 0.5 + Q * Q * Q * Q * 0.25), 6);
    for (int n = 1; n <= 6; ++n) {
        CHECK(es.eigenvalues()[n - 1] < lv.levels.at(n));
        CHECK(lv.levels.at(n) < es.eigenvalues()[n]);
    }
}
