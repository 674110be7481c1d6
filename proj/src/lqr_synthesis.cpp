#include "qcar/lqr_synthesis.hpp"

#include <cmath>
#include <sstream>

#include "qcar/simulation.hpp"

namespace qcar {

void LqrWeights::validate() const {
  if (Q.rows() != Q.cols() || Q.rows() == 0) {
    throw std::invalid_argument("Q must be a non-empty square matrix");
  }
  if (!Q.allFinite()) throw std::invalid_argument("Q must be finite");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, Q.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("Q must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9) {
    throw std::invalid_argument("Q must be positive semidefinite");
  }
  if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("R must be positive");
}

LqrWeights reference_weights() {
  LqrWeights w;
  w.Q = Eigen::Vector4d(1e10, 1e8, 1.0, 1.0).asDiagonal();
  w.R = 1.0;
  return w;
}

double LqrDesign::stability_margin() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const Complex& p : closed_loop_poles) worst = std::max(worst, p.real());
  return worst;
}

double care_residual(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const LqrWeights& w,
                     const Eigen::MatrixXd& P) {
  const Eigen::MatrixXd res =
      A.transpose() * P + P * A - (P * b) * (b.transpose() * P) / w.R + w.Q;
  return res.norm() / std::max(1.0, w.Q.norm());
}

namespace {
bool is_hurwitz(const Eigen::MatrixXd& F) {
  for (const Complex& z : eigenvalues(F))
    if (!(z.real() < 0.0)) return false;
  return true;
}
}

namespace {

// PBH test on every eigenvalue with Re >= 0.
void check_stabilizable(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const Eigen::Index n = A.rows();
  const double scale = std::max({1.0, A.norm(), b.norm()});
  for (const Complex& lambda : eigenvalues(A)) {
    if (lambda.real() < -1e-10 * scale) continue;
    Eigen::MatrixXcd pencil(n, n + 1);
    pencil.leftCols(n) = A.cast<Complex>() - lambda * Eigen::MatrixXcd::Identity(n, n);
    pencil.col(n) = b.cast<Complex>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pencil);
    const auto& sv = svd.singularValues();
    if (sv[n - 1] <= 1e-10 * sv[0]) {
      std::ostringstream os;
      os << "(A, b) is not stabilizable: mode " << lambda << " is uncontrollable";
      throw NotStabilizable(os.str());
    }
  }
}

// Solves F'X + XF = C (F Hurwitz) through the complex Schur form of F.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& F, const Eigen::MatrixXd& C) {
  const Eigen::Index n = F.rows();
  const ComplexSchur s = complex_schur(F.cast<Complex>());
  const Eigen::MatrixXcd& T = s.T;
  const Eigen::MatrixXcd Ct = s.Z.adjoint() * C.cast<Complex>() * s.Z;
  // T^H Y + Y T = Ct, Y = Z^H X Z; T^H lower, T upper triangular.
  Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Complex acc = Ct(i, j);
      for (Eigen::Index k = 0; k < i; ++k) acc -= std::conj(T(k, i)) * Y(k, j);
      for (Eigen::Index k = 0; k < j; ++k) acc -= Y(i, k) * T(k, j);
      Y(i, j) = acc / (std::conj(T(i, i)) + T(j, j));
    }
  }
  const Eigen::MatrixXd X = (s.Z * Y * s.Z.adjoint()).real();
  return 0.5 * (X + X.transpose());
}

Eigen::MatrixXd care_residual_matrix(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                     const LqrWeights& w, const Eigen::MatrixXd& P) {
  return A.transpose() * P + P * A - (P * b) * (b.transpose() * P) / w.R + w.Q;
}

}  // namespace

LqrDesign solve_care(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const LqrWeights& w) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || b.size() != n) {
    throw std::invalid_argument("solve_care: dimension mismatch between A and b");
  }
  w.validate();
  if (w.Q.rows() != n) throw std::invalid_argument("solve_care: Q dimension mismatch");
  if (!A.allFinite() || !b.allFinite()) throw std::invalid_argument("solve_care: non-finite input");
  check_stabilizable(A, b);

  Eigen::MatrixXd H(2 * n, 2 * n);
  H.topLeftCorner(n, n) = A;
  H.topRightCorner(n, n) = -(b * b.transpose()) / w.R;
  H.bottomLeftCorner(n, n) = -w.Q;
  H.bottomRightCorner(n, n) = -A.transpose();

  Eigen::MatrixXd Hb = H;
  const Eigen::VectorXd d = balance(Hb);

  ComplexSchur schur = complex_schur(Hb.cast<Complex>());
  const double axis_tol = 1e-12 * std::max(1.0, Hb.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    if (std::abs(schur.T(i, i).real()) <= axis_tol) {
      throw NoStabilizingSolution(
          "Hamiltonian has eigenvalues on the imaginary axis; no stabilizing solution");
    }
  }
  const int stable = reorder_schur(schur, [](Complex z) { return z.real() < 0.0; });
  if (stable != n) {
    throw NoStabilizingSolution("Hamiltonian stable subspace has dimension " +
                                std::to_string(stable) + ", expected " + std::to_string(n));
  }

  // Undo the balancing on the basis: H (D Z) = (D Z) T.
  const Eigen::MatrixXcd U = d.cast<Complex>().asDiagonal() * schur.Z.leftCols(n);
  const Eigen::MatrixXcd U1 = U.topRows(n);
  const Eigen::MatrixXcd U2 = U.bottomRows(n);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(U1.transpose());
  // P = U2 U1^{-1}, computed as (U1^T \ U2^T)^T.
  const Eigen::MatrixXcd Pc = lu.solve(U2.transpose()).transpose();
  if (!Pc.allFinite()) throw NoStabilizingSolution("stable subspace basis is singular");

  LqrDesign design;
  design.weights = w;
  design.P = 0.5 * (Pc.real() + Pc.real().transpose());
  design.residual_norm = care_residual(A, b, w, design.P);

  // Newton correction steps: (A - bK)' dP + dP (A - bK) = -Res(P). Kept only
  // while the residual drops and the closed loop stays stable.
  for (int step = 0; step < 3 && design.residual_norm > 0.0; ++step) {
    const Eigen::MatrixXd Ak = A - b * ((b.transpose() * design.P) / w.R);
    if (!is_hurwitz(Ak)) break;
    const Eigen::MatrixXd next =
        design.P + solve_lyapunov(Ak, -care_residual_matrix(A, b, w, design.P));
    const double r = care_residual(A, b, w, next);
    if (!next.allFinite() || !(r < design.residual_norm)) break;
    design.P = next;
    design.residual_norm = r;
  }
  design.K = (b.transpose() * design.P) / w.R;
  design.closed_loop_poles = eigenvalues(A - b * design.K);
  if (!(design.stability_margin() < 0.0)) {
    throw NoStabilizingSolution("computed gain does not stabilize the closed loop");
  }
  return design;
}

double evaluate_cost(const Trajectory& traj, const LqrWeights& w) {
  if (traj.size() == 0) throw std::invalid_argument("evaluate_cost: empty trajectory");
  if (w.Q.rows() != 4) throw std::invalid_argument("evaluate_cost: Q must be 4x4");
  auto integrand = [&](std::size_t k) {
    const StateVector& x = traj.x[k];
    return x.dot(w.Q * x) + w.R * traj.f_a[k] * traj.f_a[k];
  };
  double total = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    total += 0.5 * (integrand(k - 1) + integrand(k)) * (traj.t[k] - traj.t[k - 1]);
  }
  return total;
}

}  // namespace qcar
