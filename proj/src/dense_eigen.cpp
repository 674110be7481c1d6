#include "qcar/dense_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qcar {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string failure_message(const Eigen::MatrixXd& A, int iterations) {
  std::ostringstream os;
  os << "QR iteration did not converge after " << iterations << " iterations (n=" << A.rows()
     << ", ||A||_1=" << A.cwiseAbs().colwise().sum().maxCoeff();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (lu.isInvertible()) {
    const double inv_norm = lu.inverse().cwiseAbs().colwise().sum().maxCoeff();
    os << ", cond_1=" << A.cwiseAbs().colwise().sum().maxCoeff() * inv_norm;
  } else {
    os << ", singular";
  }
  os << ")";
  return os.str();
}

void push_2x2_eigenvalues(double a, double b, double c, double d, std::vector<Complex>& out) {
  const double mid = 0.5 * (a + d);
  const double half_diff = 0.5 * (a - d);
  const double disc = half_diff * half_diff + b * c;
  if (disc >= 0.0) {
    const double r = std::sqrt(disc);
    // Avoid cancellation: compute the larger-magnitude root first.
    const double big = mid + std::copysign(r, mid);
    const double det = a * d - b * c;
    const double small = big != 0.0 ? det / big : mid - std::copysign(r, mid);
    out.emplace_back(big, 0.0);
    out.emplace_back(small, 0.0);
  } else {
    const double im = std::sqrt(-disc);
    out.emplace_back(mid, im);
    out.emplace_back(mid, -im);
  }
}

// Francis double-shift QR on an upper Hessenberg matrix, eigenvalues only.
std::vector<Complex> francis_qr(Eigen::MatrixXd H, const Eigen::MatrixXd& original) {
  const int n = static_cast<int>(H.rows());
  std::vector<Complex> values;
  values.reserve(n);
  const double norm = std::max(H.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const int max_iter = 60 * std::max(n, 1);

  int hi = n - 1;
  int iter = 0;
  int total_iter = 0;
  while (hi >= 0) {
    int l = hi;
    while (l > 0) {
      double s = std::abs(H(l - 1, l - 1)) + std::abs(H(l, l));
      if (s == 0.0) s = norm;
      if (std::abs(H(l, l - 1)) <= kEps * s) {
        H(l, l - 1) = 0.0;
        break;
      }
      --l;
    }

    if (l == hi) {
      values.emplace_back(H(hi, hi), 0.0);
      --hi;
      iter = 0;
      continue;
    }
    if (l == hi - 1) {
      push_2x2_eigenvalues(H(hi - 1, hi - 1), H(hi - 1, hi), H(hi, hi - 1), H(hi, hi), values);
      hi -= 2;
      iter = 0;
      continue;
    }

    if (++total_iter > max_iter) throw EigenSolverError(failure_message(original, total_iter));
    ++iter;

    double s;  // shift sum
    double t;  // shift product
    if (iter % 10 == 0) {
      const double w = std::abs(H(hi, hi - 1)) + std::abs(H(hi - 1, hi - 2));
      s = 1.5 * w;
      t = w * w;
    } else {
      s = H(hi - 1, hi - 1) + H(hi, hi);
      t = H(hi - 1, hi - 1) * H(hi, hi) - H(hi - 1, hi) * H(hi, hi - 1);
    }

    double x = H(l, l) * H(l, l) + H(l, l + 1) * H(l + 1, l) - s * H(l, l) + t;
    double y = H(l + 1, l) * (H(l, l) + H(l + 1, l + 1) - s);
    double z = H(l + 1, l) * H(l + 2, l + 1);

    for (int k = l; k <= hi - 2; ++k) {
      Eigen::Vector3d v(x, y, z);
      const double alpha = v.norm();
      if (alpha != 0.0) {
        v[0] += std::copysign(alpha, x);
        const double vtv = v.squaredNorm();
        const int col0 = std::max(l, k - 1);
        for (int j = col0; j <= hi; ++j) {
          const double f = 2.0 * (v[0] * H(k, j) + v[1] * H(k + 1, j) + v[2] * H(k + 2, j)) / vtv;
          H(k, j) -= f * v[0];
          H(k + 1, j) -= f * v[1];
          H(k + 2, j) -= f * v[2];
        }
        const int row1 = std::min(k + 3, hi);
        for (int i = l; i <= row1; ++i) {
          const double f = 2.0 * (H(i, k) * v[0] + H(i, k + 1) * v[1] + H(i, k + 2) * v[2]) / vtv;
          H(i, k) -= f * v[0];
          H(i, k + 1) -= f * v[1];
          H(i, k + 2) -= f * v[2];
        }
      }
      x = H(k + 1, k);
      y = H(k + 2, k);
      if (k < hi - 2) z = H(k + 3, k);
    }

    // Closing 2-vector reflection on rows/cols hi-1, hi.
    Eigen::Vector2d v(x, y);
    const double alpha = v.norm();
    if (alpha != 0.0) {
      v[0] += std::copysign(alpha, x);
      const double vtv = v.squaredNorm();
      for (int j = std::max(l, hi - 2); j <= hi; ++j) {
        const double f = 2.0 * (v[0] * H(hi - 1, j) + v[1] * H(hi, j)) / vtv;
        H(hi - 1, j) -= f * v[0];
        H(hi, j) -= f * v[1];
      }
      for (int i = l; i <= hi; ++i) {
        const double f = 2.0 * (H(i, hi - 1) * v[0] + H(i, hi) * v[1]) / vtv;
        H(i, hi - 1) -= f * v[0];
        H(i, hi) -= f * v[1];
      }
    }
  }
  return values;
}

// Rotation [c s; -conj(s) c] (c real) mapping (a, b) to (r, 0).
struct Givens {
  double c = 1.0;
  Complex s{0.0, 0.0};
};

Givens make_givens(Complex a, Complex b) {
  const double abs_b = std::abs(b);
  if (abs_b == 0.0) return {};
  const double abs_a = std::abs(a);
  if (abs_a == 0.0) return {0.0, std::conj(b) / abs_b};
  const double r = std::hypot(abs_a, abs_b);
  const Complex phase = a / abs_a;
  return {abs_a / r, phase * std::conj(b) / r};
}

// rows i, i+1 <- G * rows, columns [c0, c1]
void apply_left(Eigen::MatrixXcd& M, const Givens& g, int i, int c0, int c1) {
  for (int j = c0; j <= c1; ++j) {
    const Complex a = M(i, j);
    const Complex b = M(i + 1, j);
    M(i, j) = g.c * a + g.s * b;
    M(i + 1, j) = -std::conj(g.s) * a + g.c * b;
  }
}

// columns i, i+1 <- columns * G^H, rows [r0, r1]
void apply_right(Eigen::MatrixXcd& M, const Givens& g, int i, int r0, int r1) {
  for (int k = r0; k <= r1; ++k) {
    const Complex a = M(k, i);
    const Complex b = M(k, i + 1);
    M(k, i) = g.c * a + std::conj(g.s) * b;
    M(k, i + 1) = -g.s * a + g.c * b;
  }
}

}  // namespace

Eigen::VectorXd balance(Eigen::MatrixXd& A) {
  const Eigen::Index n = A.rows();
  Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
  constexpr double radix = 2.0;
  bool converged = false;
  for (int sweep = 0; !converged && sweep < 100; ++sweep) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(A(j, i));
        r += std::abs(A(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      const double s = c + r;
      double f = 1.0;
      double g = r / radix;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c >= g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        converged = false;
        d[i] *= f;
        A.row(i) /= f;
        A.col(i) *= f;
      }
    }
  }
  return d;
}

Eigen::MatrixXd hessenberg(const Eigen::MatrixXd& A, Eigen::MatrixXd* Q) {
  if (A.rows() != A.cols()) throw std::invalid_argument("hessenberg: matrix must be square");
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd H = A;
  if (Q) *Q = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    Eigen::VectorXd v = H.block(k + 1, k, n - k - 1, 1);
    const double alpha = v.norm();
    if (alpha == 0.0) continue;
    v[0] += std::copysign(alpha, v[0]);
    const double vtv = v.squaredNorm();
    auto rows = H.middleRows(k + 1, n - k - 1);
    rows -= (2.0 / vtv) * v * (v.transpose() * rows);
    auto cols = H.middleCols(k + 1, n - k - 1);
    cols -= (2.0 / vtv) * (cols * v) * v.transpose();
    for (Eigen::Index i = k + 2; i < n; ++i) H(i, k) = 0.0;
    if (Q) {
      auto qcols = Q->middleCols(k + 1, n - k - 1);
      qcols -= (2.0 / vtv) * (qcols * v) * v.transpose();
    }
  }
  return H;
}

std::vector<Complex> eigenvalues(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("eigenvalues: matrix must be square");
  if (!A.allFinite()) throw std::invalid_argument("eigenvalues: matrix has non-finite entries");
  if (A.rows() == 0) return {};
  Eigen::MatrixXd B = A;
  balance(B);
  std::vector<Complex> values = francis_qr(hessenberg(B), A);
  std::sort(values.begin(), values.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return values;
}

ComplexSchur complex_schur(const Eigen::MatrixXcd& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("complex_schur: matrix must be square");
  const int n = static_cast<int>(A.rows());
  ComplexSchur out{A, Eigen::MatrixXcd::Identity(n, n)};
  Eigen::MatrixXcd& H = out.T;
  Eigen::MatrixXcd& Z = out.Z;

  // Householder Hessenberg reduction.
  for (int k = 0; k + 2 < n; ++k) {
    Eigen::VectorXcd v = H.block(k + 1, k, n - k - 1, 1);
    const double alpha = v.norm();
    if (alpha == 0.0) continue;
    const Complex phase = std::abs(v[0]) == 0.0 ? Complex(1.0) : v[0] / std::abs(v[0]);
    v[0] += phase * alpha;
    const double vtv = v.squaredNorm();
    auto rows = H.middleRows(k + 1, n - k - 1);
    rows -= (2.0 / vtv) * v * (v.adjoint() * rows);
    auto cols = H.middleCols(k + 1, n - k - 1);
    cols -= (2.0 / vtv) * (cols * v) * v.adjoint();
    auto zcols = Z.middleCols(k + 1, n - k - 1);
    zcols -= (2.0 / vtv) * (zcols * v) * v.adjoint();
    for (int i = k + 2; i < n; ++i) H(i, k) = 0.0;
  }

  const double norm = std::max(H.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const int max_iter = 60 * std::max(n, 1);
  int hi = n - 1;
  int iter = 0;
  int total_iter = 0;
  std::vector<Givens> rotations(std::max(n - 1, 0));
  while (hi > 0) {
    int l = hi;
    while (l > 0) {
      double s = std::abs(H(l - 1, l - 1)) + std::abs(H(l, l));
      if (s == 0.0) s = norm;
      if (std::abs(H(l, l - 1)) <= kEps * s) {
        H(l, l - 1) = 0.0;
        break;
      }
      --l;
    }
    if (l == hi) {
      --hi;
      iter = 0;
      continue;
    }
    if (++total_iter > max_iter) {
      throw EigenSolverError(failure_message(A.real(), total_iter));
    }
    ++iter;

    Complex mu;
    if (iter % 10 == 0) {
      mu = H(hi, hi) + 0.75 * std::abs(H(hi, hi - 1));
    } else {
      // Wilkinson shift: eigenvalue of the trailing 2x2 closest to H(hi, hi).
      const Complex a = H(hi - 1, hi - 1);
      const Complex b = H(hi - 1, hi);
      const Complex c = H(hi, hi - 1);
      const Complex d = H(hi, hi);
      const Complex half = 0.5 * (a - d);
      const Complex root = std::sqrt(half * half + b * c);
      const Complex m1 = d + half + root;
      const Complex m2 = d + half - root;
      mu = std::abs(m1 - d) < std::abs(m2 - d) ? m1 : m2;
    }

    for (int i = l; i <= hi; ++i) H(i, i) -= mu;
    for (int k = l; k < hi; ++k) {
      rotations[k] = make_givens(H(k, k), H(k + 1, k));
      apply_left(H, rotations[k], k, k, n - 1);
      H(k + 1, k) = 0.0;
    }
    for (int k = l; k < hi; ++k) {
      apply_right(H, rotations[k], k, 0, std::min(k + 1, hi));
      apply_right(Z, rotations[k], k, 0, n - 1);
    }
    for (int i = l; i <= hi; ++i) H(i, i) += mu;
  }
  for (int j = 0; j < n; ++j) {
    for (int i = j + 1; i < n; ++i) H(i, j) = 0.0;
  }
  return out;
}

int reorder_schur(ComplexSchur& schur, const std::function<bool(Complex)>& select) {
  Eigen::MatrixXcd& T = schur.T;
  Eigen::MatrixXcd& Z = schur.Z;
  const int n = static_cast<int>(T.rows());
  int placed = 0;
  for (int j = 0; j < n; ++j) {
    if (!select(T(j, j))) continue;
    // Bubble entry j up to position `placed` by adjacent swaps.
    for (int k = j - 1; k >= placed; --k) {
      const Complex a = T(k, k);
      const Complex c = T(k + 1, k + 1);
      // Eigenvector of the 2x2 block for eigenvalue c is (T(k,k+1), c - a).
      const Givens g = make_givens(T(k, k + 1), c - a);
      // make_givens maps (x, y) to (r, 0); its first row is q1^H for q1 along (x, y).
      apply_left(T, g, k, k, n - 1);
      apply_right(T, g, k, 0, k + 1);
      apply_right(Z, g, k, 0, n - 1);
      T(k + 1, k) = 0.0;
      T(k, k) = c;
      T(k + 1, k + 1) = a;
    }
    ++placed;
  }
  return placed;
}

}  // namespace qcar
