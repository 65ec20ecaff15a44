#pragma once

// Bargmann-Fock quantization of one degree of freedom in the Kahler polarization spanned by d_z,
// z = (q - i p) / sqrt 2. Polarized sections are psi(z) s with (s, s) = exp(-2 pi |z|^2) and
// s* alpha = beta = i conj(z) dz; the inner product uses the measure dq dp.
//
// States are truncated polynomials sum_{n <= N} c_n z^n; operators are matrices in the monomial
// basis whose column n is the image of z^n.

#include <Eigen/Dense>

#include <vector>

#include "geoquant/phasespace.hpp"
#include "geoquant/spectral.hpp"

namespace geoquant {

struct FockWeight {
    /// exp(-2 pi |z|^2).
    static double weight(cplx z);
    /// beta at z applied to the tangent with dz component dz.
    static cplx beta(cplx z, cplx dz);
    /// g_n = int |z|^{2n} exp(-2 pi |z|^2) dq dp = n! / (2 pi)^n.
    static double monomial_norm(int n);
};

struct FockState {
    std::vector<cplx> coeffs;

    int truncation() const { return static_cast<int>(coeffs.size()) - 1; }
    cplx evaluate(cplx z) const;
};

/// sum c1_n conj(c2_n) g_n. ShapeError on truncation mismatch.
cplx fock_inner(const FockState& s1, const FockState& s2);

struct QuantizedOperator {
    Eigen::MatrixXcd matrix;
    Polynomial source{1};

    int truncation() const { return static_cast<int>(matrix.rows()) - 1; }
    /// The matrix in the orthonormal basis z^n / sqrt(g_n).
    Eigen::MatrixXcd normalized() const;
    FockState apply(const FockState& s) const;
};

/// f^ = (1/2 pi i) nabla_{X_f} + f on holomorphic polynomials of degree <= N, followed by the
/// orthogonal projection onto holomorphic polynomials; images above degree N are dropped.
/// Degree > 2 (whose flow does not preserve the polarization) raises UnsupportedError.
QuantizedOperator quantize(const Observable& f, int truncation);

/// Sorted eigenvalues of a hermitian operator (NumericError if it is not hermitian to 1e-12).
std::vector<double> spectrum(const QuantizedOperator& op);

/// The harmonic oscillator h = Omega |z|^2 = Omega (q^2 + p^2) / 2.
Polynomial harmonic_oscillator(double omega);

}  // namespace geoquant
