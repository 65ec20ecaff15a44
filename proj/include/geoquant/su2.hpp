#pragma once

// SU(2) = { [[z0, z1], [-conj z1, conj z0]] : |z0|^2 + |z1|^2 = 1 } as S^3 in C^2, its invariant
// vector fields, the right-invariant 1-form theta_f of f = (-l, 0, 0), and the representation
// induced by the stabilizer character on holomorphic homogeneous polynomials.
//
// Algebra element of a in R^3: x_a = -(i/2) [[a1, a2 - i a3], [a2 + i a3, -a1]], so [x_a, x_b] = x_{a x b}.
// Tangent vectors are the components (dz0, dz1, dconj z0, dconj z1).

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <map>
#include <optional>

#include "geoquant/spectral.hpp"

namespace geoquant {

using Vec3 = std::array<double, 3>;
using Tangent4 = std::array<cplx, 4>;

class Su2Point {
public:
    /// Normalizes (z0, z1) onto the unit sphere; the zero vector is a ValidationError.
    Su2Point(cplx z0, cplx z1);
    static Su2Point identity() { return {1.0, 0.0}; }

    cplx z0() const { return z0_; }
    cplx z1() const { return z1_; }
    Eigen::Matrix2cd matrix() const;
    static Su2Point from_matrix(const Eigen::Matrix2cd& m);

private:
    cplx z0_, z1_;
};

Eigen::Matrix2cd algebra_element(const Vec3& a);
Vec3 lie_bracket(const Vec3& a, const Vec3& b);

enum class FieldSide { right_Y, left_Z };

/// Y_a(g) = d/dt e^{t x_a} g (right-invariant), Z_a(g) = d/dt g e^{t x_a} (left-invariant), at t = 0.
/// The formulas are linear in (z, conj z) and are evaluated as written for any point of C^2.
Tangent4 invariant_field(FieldSide side, const Vec3& a, cplx z0, cplx z1);
Tangent4 invariant_field(FieldSide side, const Vec3& a, const Su2Point& g);

struct Weight {
    double l = 0.0;
    std::optional<long> quantum_n;  // set iff 4 pi l is within 1e-9 of an integer

    explicit Weight(double l);
};

/// theta_f = i l sum_k (z_k dconj z_k - conj z_k dz_k) for f = (-l, 0, 0).
/// PreconditionError when the tangent violates sum_k (conj z_k dz_k + z_k dconj z_k) = 0.
cplx theta_f(const Weight& w, const Su2Point& g, const Tangent4& v);

/// The stabilizer character chi_f(h_t) = exp(4 pi i l t), h_t = diag(e^{it}, e^{-it}).
cplx character(const Weight& w, double t);

/// n with |4 pi l - n| < tol, if any.
std::optional<long> quantizable(double l, double tol = 1e-9);

/// Polynomial in (z0, z1, conj z0, conj z1); exponents in that order.
struct S3Polynomial {
    std::map<std::array<int, 4>, cplx> terms;

    cplx evaluate(cplx z0, cplx z1) const;
};

/// Every monomial has holomorphic minus antiholomorphic degree equal to 4 pi l (to 1e-9).
bool homogeneity_check(const S3Polynomial& poly, double l);

/// Right translation (U_g psi)(g') = psi(g' g) on holomorphic polynomials of degree n, basis
/// z0^(n-k) z1^k for k = 0..n. generators[a] is the derivative along x_{e_a}; they are antihermitian
/// for the S^3 inner product and satisfy [J_a, J_b] = J_{a x b}. The hermitian i J_a carry the
/// spin-j spectrum, j = n/2; the stabilizer direction is a = e_1.
struct InducedRep {
    int n = 0;
    std::array<Eigen::MatrixXcd, 3> generators;

    int dimension() const { return n + 1; }
    /// -(J_1^2 + J_2^2 + J_3^2), equal to j(j+1) Id.
    Eigen::MatrixXcd casimir() const;
    /// Eigenvalues of i J_1 in increasing order: -j, ..., j.
    std::vector<double> j1_eigenvalues() const;
    /// Gram matrix of the basis for the normalized S^3 measure: a! b! / (n+1)!.
    Eigen::MatrixXd gram() const;
    /// Coefficients of psi(g' g) in the basis, for psi with coefficients c.
    Eigen::VectorXcd translate(const Eigen::VectorXcd& c, const Su2Point& g) const;
};

InducedRep induced_rep(int n);

}  // namespace geoquant
