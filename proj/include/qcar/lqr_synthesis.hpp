#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcar/dense_eigen.hpp"

namespace qcar {

struct Trajectory;

class NotStabilizable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoStabilizingSolution : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// State weight Q (symmetric PSD) and scalar control weight R > 0.
struct LqrWeights {
  Eigen::MatrixXd Q;
  double R = 1.0;

  void validate() const;
};

/// Q = diag(1e10, 1e8, 1, 1), R = 1: heavy penalty on suspension travel and
/// body velocity, negligible on the wheel states.
LqrWeights reference_weights();

struct LqrDesign {
  LqrWeights weights;
  Eigen::MatrixXd P;
  Eigen::RowVectorXd K;
  double residual_norm = 0.0;  ///< ||CARE residual||_F / max(1, ||Q||_F)
  std::vector<Complex> closed_loop_poles;

  /// Largest real part among the closed-loop poles (negative when stabilizing).
  double stability_margin() const;
};

/// Stabilizing solution of A'P + PA - P b R^{-1} b'P + Q = 0 for a single
/// actuated column b, via the ordered Schur form of the Hamiltonian
/// [[A, -b b'/R], [-Q, -A']]. K = b'P / R.
LqrDesign solve_care(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const LqrWeights& w);

/// Normalized residual of a candidate P, as reported in LqrDesign.
double care_residual(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const LqrWeights& w,
                     const Eigen::MatrixXd& P);

/// Trapezoidal approximation of the integral of x'Qx + R F_a^2 over the
/// trajectory horizon.
double evaluate_cost(const Trajectory& trajectory, const LqrWeights& w);

}  // namespace qcar
