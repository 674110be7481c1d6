#pragma once

// Small dense eigenvalue machinery: balancing, Householder Hessenberg
// reduction, Francis double-shift QR for real spectra, and a complex Schur
// form with eigenvalue reordering. Sized for matrices up to roughly 16x16.

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace qcar {

using Complex = std::complex<double>;

class EigenSolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Diagonal similarity D (powers of two) such that D^{-1} A D has rows and
/// columns of comparable norm. Returns the diagonal of D.
Eigen::VectorXd balance(Eigen::MatrixXd& A);

/// Householder reduction to upper Hessenberg form. When Q is non-null it
/// receives the orthogonal factor with A_in = Q H Q^T.
Eigen::MatrixXd hessenberg(const Eigen::MatrixXd& A, Eigen::MatrixXd* Q = nullptr);

/// All eigenvalues of a real square matrix. Complex values come in exact
/// conjugate pairs; the list is sorted by real part, then imaginary part.
std::vector<Complex> eigenvalues(const Eigen::MatrixXd& A);

struct ComplexSchur {
  Eigen::MatrixXcd T;  ///< upper triangular
  Eigen::MatrixXcd Z;  ///< unitary, A = Z T Z^H
};

ComplexSchur complex_schur(const Eigen::MatrixXcd& A);

/// Moves every diagonal entry of T satisfying `select` to the leading
/// positions, updating Z so that A = Z T Z^H still holds. Returns the number
/// of selected eigenvalues.
int reorder_schur(ComplexSchur& schur, const std::function<bool(Complex)>& select);

}  // namespace qcar
