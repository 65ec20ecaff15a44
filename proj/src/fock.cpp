#include "geoquant/fock.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "geoquant/constants.hpp"
#include "geoquant/error.hpp"

namespace geoquant {

namespace {

constexpr cplx i_unit{0.0, 1.0};

using ZTerms = std::map<std::pair<int, int>, cplx>;  // (a, b) -> coefficient of z^a conj(z)^b

ZTerms multiply(const ZTerms& x, const ZTerms& y) {
    ZTerms out;
    for (const auto& [ex, cx] : x)
        for (const auto& [ey, cy] : y) out[{ex.first + ey.first, ex.second + ey.second}] += cx * cy;
    return out;
}

// q = (z + conj z) / sqrt 2, p = i (z - conj z) / sqrt 2
ZTerms to_z(const Polynomial& f) {
    const double r = 1.0 / std::sqrt(2.0);
    const ZTerms q{{{1, 0}, r}, {{0, 1}, r}};
    const ZTerms p{{{1, 0}, i_unit * r}, {{0, 1}, -i_unit * r}};
    ZTerms out;
    for (const auto& [e, c] : f.terms()) {
        ZTerms t{{{0, 0}, c}};
        for (int k = 0; k < e[0]; ++k) t = multiply(t, q);
        for (int k = 0; k < e[1]; ++k) t = multiply(t, p);
        for (const auto& [ez, cz] : t) out[ez] += cz;
    }
    return out;
}

double falling(int g, int b) {
    double s = 1.0;
    for (int k = 0; k < b; ++k) s *= g - k;
    return s;
}

}  // namespace

double FockWeight::weight(cplx z) { return std::exp(-2.0 * std::numbers::pi * std::norm(z)); }

cplx FockWeight::beta(cplx z, cplx dz) { return i_unit * std::conj(z) * dz; }

double FockWeight::monomial_norm(int n) {
    if (n < 0) throw ValidationError("monomial degree must be non-negative");
    double g = 1.0;
    for (int k = 1; k <= n; ++k) g *= k / (2.0 * std::numbers::pi);
    return g;
}

cplx FockState::evaluate(cplx z) const {
    cplx s{};
    for (std::size_t k = coeffs.size(); k-- > 0;) s = s * z + coeffs[k];
    return s;
}

cplx fock_inner(const FockState& s1, const FockState& s2) {
    if (s1.coeffs.size() != s2.coeffs.size()) throw ShapeError("Fock states have different truncations");
    cplx s{};
    for (std::size_t n = 0; n < s1.coeffs.size(); ++n)
        s += s1.coeffs[n] * std::conj(s2.coeffs[n]) * FockWeight::monomial_norm(static_cast<int>(n));
    return s;
}

Eigen::MatrixXcd QuantizedOperator::normalized() const {
    const long d = matrix.rows();
    Eigen::VectorXd sq(d);
    for (long n = 0; n < d; ++n) sq[n] = std::sqrt(FockWeight::monomial_norm(static_cast<int>(n)));
    return sq.asDiagonal() * matrix * sq.cwiseInverse().asDiagonal();
}

FockState QuantizedOperator::apply(const FockState& s) const {
    if (s.truncation() != truncation()) throw ShapeError("state truncation does not match operator");
    const Eigen::VectorXcd c = Eigen::Map<const Eigen::VectorXcd>(s.coeffs.data(), static_cast<long>(s.coeffs.size()));
    const Eigen::VectorXcd r = matrix * c;
    return {std::vector<cplx>(r.data(), r.data() + r.size())};
}

QuantizedOperator quantize(const Observable& f, int truncation) {
    if (truncation < 0) throw ValidationError("truncation must be non-negative");
    if (!f.is_polynomial()) throw UnsupportedError("Fock quantization needs a polynomial observable");
    if (f.dim() != 1) throw UnsupportedError("Fock quantization is implemented for one degree of freedom");
    if (f.degree() > 2)
        throw UnsupportedError("observable of degree " + std::to_string(f.degree()) +
                               " is not quantizable in the Fock space: its flow does not preserve the "
                               "polarization (L_{X_f} P != 0); only degree <= 2 is allowed");
    const ZTerms terms = to_z(f.polynomial());
    const int d = truncation + 1;
    QuantizedOperator op{Eigen::MatrixXcd::Zero(d, d), f.polynomial()};
    // project z^g conj(z)^b onto holomorphic polynomials: g!/(g-b)! hbar^b z^(g-b)
    auto deposit = [&](int col, int g, int b, cplx c) {
        if (g < b || g - b > truncation || c == cplx{}) return;
        op.matrix(g - b, col) += c * falling(g, b) * std::pow(hbar, b);
    };
    for (int m = 0; m < d; ++m) {
        for (const auto& [e, c] : terms) {
            const auto [a, b] = e;
            // (1/2 pi) f_zbar psi' + (f - zbar f_zbar) psi
            if (b >= 1 && m >= 1) deposit(m, a + m - 1, b - 1, c * static_cast<double>(b * m) / (2.0 * std::numbers::pi));
            deposit(m, a + m, b, c * static_cast<double>(1 - b));
        }
    }
    return op;
}

std::vector<double> spectrum(const QuantizedOperator& op) {
    const Eigen::MatrixXcd m = op.normalized();
    if ((m - m.adjoint()).norm() > 1e-12 * std::max(1.0, m.norm())) throw NumericError("operator is not hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("eigensolver did not converge");
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end());
    return ev;
}

Polynomial harmonic_oscillator(double omega) {
    const Polynomial q = Polynomial::q(1), p = Polynomial::p(1);
    return (q * q + p * p) * (0.5 * omega);
}

}  // namespace geoquant
