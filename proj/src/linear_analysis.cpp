#include "qcar/linear_analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace qcar {

void ClosedLoopSystem::validate() const {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.size() != n || C.rows() != 3 || C.cols() != n) {
    throw std::invalid_argument("closed-loop system '" + label + "' has inconsistent dimensions");
  }
  if (!A.allFinite() || !B.allFinite() || !C.allFinite() || !D.allFinite()) {
    throw std::invalid_argument("closed-loop system '" + label + "' has non-finite entries");
  }
}

ClosedLoopSystem open_loop(const StateSpace& ss) {
  ClosedLoopSystem sys;
  sys.A = ss.A;
  sys.B = ss.road_column();
  sys.C = ss.C;
  sys.D = ss.D.col(0);
  sys.variant = Variant::kPassive;
  sys.label = "passive";
  return sys;
}

ClosedLoopSystem close_loop_lqr(const StateSpace& ss, const Eigen::RowVectorXd& K) {
  if (K.size() != 4) throw std::invalid_argument("close_loop_lqr: K must be 1x4");
  ClosedLoopSystem sys = open_loop(ss);
  sys.A = ss.A - ss.force_column() * K;
  // Acceleration sees the actuator force directly.
  sys.C = ss.C - ss.D.col(1) * K;
  sys.variant = Variant::kLqr;
  sys.label = "lqr";
  return sys;
}

ClosedLoopSystem close_loop_pid(const StateSpace& ss, const PidGains& motion, const PidGains& travel) {
  for (const PidGains* g : {&motion, &travel}) {
    g->validate();
  }
  const Eigen::RowVector4d c_motion(1.0, 0.0, 1.0, 0.0);
  const Eigen::RowVector4d c_travel(1.0, 0.0, 0.0, 0.0);

  const bool has_integral = motion.k_i > 0.0 || travel.k_i > 0.0;
  const bool motion_filter = motion.k_d > 0.0;
  const bool travel_filter = travel.k_d > 0.0;
  const int nc = int(has_integral) + int(motion_filter) + int(travel_filter);
  const int n = 4 + nc;

  // Controller: xc' = Gx x + Gc xc, F_a = Fx x + Fc xc, with errors e = -c x.
  Eigen::RowVector4d Fx = -(motion.k_p + motion.k_d * motion.n_filter * motion_filter) * c_motion -
                          (travel.k_p + travel.k_d * travel.n_filter * travel_filter) * c_travel;
  Eigen::RowVectorXd Fc = Eigen::RowVectorXd::Zero(nc);
  Eigen::MatrixXd Gx = Eigen::MatrixXd::Zero(nc, 4);
  Eigen::MatrixXd Gc = Eigen::MatrixXd::Zero(nc, nc);
  int idx = 0;
  if (has_integral) {
    Gx.row(idx) = -motion.k_i * c_motion - travel.k_i * c_travel;
    Fc[idx] = 1.0;
    ++idx;
  }
  auto add_filter = [&](const PidGains& g, const Eigen::RowVector4d& c) {
    // k_d n s / (s + n) = k_d n - k_d n^2 / (s + n); state f' = -n f + e.
    Gx.row(idx) = -c;
    Gc(idx, idx) = -g.n_filter;
    Fc[idx] = -g.k_d * g.n_filter * g.n_filter;
    ++idx;
  };
  if (motion_filter) add_filter(motion, c_motion);
  if (travel_filter) add_filter(travel, c_travel);

  const Eigen::Vector4d b_force = ss.force_column();
  ClosedLoopSystem sys;
  sys.A = Eigen::MatrixXd::Zero(n, n);
  sys.A.topLeftCorner(4, 4) = ss.A + b_force * Fx;
  sys.A.topRightCorner(4, nc) = b_force * Fc;
  sys.A.bottomLeftCorner(nc, 4) = Gx;
  sys.A.bottomRightCorner(nc, nc) = Gc;
  sys.B = Eigen::VectorXd::Zero(n);
  sys.B.head(4) = ss.road_column();
  sys.C = Eigen::MatrixXd::Zero(3, n);
  sys.C.leftCols(4) = ss.C + ss.D.col(1) * Fx;
  sys.C.rightCols(nc) = ss.D.col(1) * Fc;
  sys.D = ss.D.col(0);
  sys.variant = Variant::kPid;
  sys.label = "pid";
  sys.validate();
  return sys;
}

ClosedLoopSystem close_loop_pid(const StateSpace& ss, const PidSettings& settings) {
  PidGains motion = settings.motion;
  PidGains travel = settings.travel;
  if (!settings.motion_enabled) motion.k_p = motion.k_i = motion.k_d = 0.0;
  if (!settings.travel_enabled) travel.k_p = travel.k_i = travel.k_d = 0.0;
  return close_loop_pid(ss, motion, travel);
}

std::vector<Complex> compute_poles(const ClosedLoopSystem& sys) {
  sys.validate();
  return eigenvalues(sys.A);
}

ZeroSet compute_zero_set(const ClosedLoopSystem& sys, Channel channel) {
  sys.validate();
  const Eigen::Index n = sys.state_dim();
  const Eigen::RowVectorXd c = sys.C.row(static_cast<int>(channel));
  const double d = sys.D[static_cast<int>(channel)];
  const Eigen::VectorXd& b = sys.B;
  const Eigen::MatrixXd& A = sys.A;

  ZeroSet out;
  const double cb_scale = c.norm() * b.norm();
  if (cb_scale == 0.0 && d == 0.0) {
    throw std::invalid_argument("compute_zeros: transfer function is identically zero");
  }

  if (std::abs(d) > 1e-12 * (cb_scale + std::abs(d))) {
    out.relative_degree = 0;
    out.gain = d;
    out.zeros = eigenvalues(A - b * c / d);
    return out;
  }

  // Markov parameters c A^k b locate the first nonzero; its index is the
  // relative degree r, and the remaining n - r pencil eigenvalues are finite.
  // They are invariant under diagonal similarity, so work on the balanced
  // triple where ||A|| reflects the spectrum rather than raw gain magnitudes.
  Eigen::MatrixXd Ab = A;
  const Eigen::VectorXd scale = balance(Ab);
  const Eigen::VectorXd bb = b.cwiseQuotient(scale);
  const Eigen::RowVectorXd cb = c.cwiseProduct(scale.transpose());
  const double a_norm = std::max(Ab.norm(), 1e-300);
  const double markov_scale = cb.norm() * bb.norm();

  Eigen::MatrixXd obs(n, n);
  Eigen::RowVectorXd row = cb;
  int r = 0;
  double markov = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    obs.row(k) = row;
    markov = row.dot(bb);
    const double tol = 1e-12 * markov_scale * std::pow(a_norm, static_cast<double>(k));
    if (std::abs(markov) > tol) {
      r = static_cast<int>(k) + 1;
      break;
    }
    row = row * Ab;
  }
  if (r == 0) {
    throw std::invalid_argument("compute_zeros: degenerate pencil (all Markov parameters vanish)");
  }
  out.relative_degree = r;
  out.gain = markov;
  if (r == n) return out;

  // Zero dynamics: feedback holding the output at 0 leaves ker(obs) invariant.
  const Eigen::RowVectorXd c_ar = obs.row(r - 1) * Ab;
  const Eigen::MatrixXd A_zero = Ab - bb * c_ar / markov;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(obs.topRows(r), Eigen::ComputeFullV);
  const Eigen::MatrixXd N = svd.matrixV().rightCols(n - r);
  out.zeros = eigenvalues(N.transpose() * A_zero * N);
  return out;
}

std::vector<Complex> compute_zeros(const ClosedLoopSystem& sys, Channel channel) {
  return compute_zero_set(sys, channel).zeros;
}

Complex transfer_value(const ClosedLoopSystem& sys, Channel channel, Complex s) {
  const Eigen::Index n = sys.state_dim();
  const Eigen::MatrixXcd M = s * Eigen::MatrixXcd::Identity(n, n) - sys.A.cast<Complex>();
  const Eigen::VectorXcd x = M.partialPivLu().solve(sys.B.cast<Complex>());
  return sys.C.row(static_cast<int>(channel)).cast<Complex>().dot(x) +
         sys.D[static_cast<int>(channel)];
}

std::string to_string(Stability s) { return s == Stability::kStable ? "stable" : "unstable"; }

Stability stability_verdict(const std::vector<Complex>& poles, double margin) {
  if (poles.empty()) throw std::invalid_argument("stability_verdict: empty pole list");
  for (const Complex& p : poles) {
    if (!(p.real() < -margin)) return Stability::kUnstable;
  }
  return Stability::kStable;
}

PoleZeroMap pole_zero_map(const ClosedLoopSystem& sys, Channel channel) {
  return {sys.variant, channel, compute_poles(sys), compute_zeros(sys, channel)};
}

}  // namespace qcar
