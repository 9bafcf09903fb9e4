// Continuous-time algebraic Riccati equation for the surge/yaw plant.
//
// The plant matrices are block diagonal (surge | yaw). With weights that
// respect the split, P is block diagonal too: the surge block is a scalar
// quadratic with a closed-form root, the yaw block a 2x2 ARE. Coupled weights
// fall back to the full 3x3 problem. Both matrix cases run Newton-Kleinman:
//
//   K_0 stabilizing,  (A - B K_k)' P_k + P_k (A - B K_k) = -(Q + K_k' R K_k),
//   K_{k+1} = R^-1 B' P_k
//
// with each Lyapunov equation solved as an n^2 x n^2 Kronecker system.

#include <cmath>
#include <sstream>

#include "helm/control.hpp"

namespace helm {

namespace {

constexpr int kMaxNewtonIterations = 50;
constexpr double kSymmetryTol = 1e-12;

template <int N>
using Mat = Eigen::Matrix<double, N, N>;

/// Solves Ak' P + P Ak = -M.
template <int N>
Mat<N> solve_lyapunov(const Mat<N>& Ak, const Mat<N>& M) {
  constexpr int NN = N * N;
  const Mat<N> I = Mat<N>::Identity();
  Eigen::Matrix<double, NN, NN> L;
  // vec(Ak' P) = (I (x) Ak') vec(P); vec(P Ak) = (Ak' (x) I) vec(P)
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      L.template block<N, N>(i * N, j * N) = I(i, j) * Ak.transpose() + Ak(j, i) * I;
    }
  }
  const Eigen::Matrix<double, NN, 1> rhs = -Eigen::Map<const Eigen::Matrix<double, NN, 1>>(M.data());
  const Eigen::FullPivLU<Eigen::Matrix<double, NN, NN>> lu(L);
  if (!lu.isInvertible()) {
    throw NumericalError("solve_care: singular Lyapunov operator (gain not stabilizing)");
  }
  const Eigen::Matrix<double, NN, 1> vp = lu.solve(rhs);
  Mat<N> P = Eigen::Map<const Mat<N>>(vp.data());
  return 0.5 * (P + P.transpose());
}

template <int N, int M>
Mat<N> newton_kleinman(const Mat<N>& A, const Eigen::Matrix<double, N, M>& B, const Mat<N>& Q,
                       const Eigen::Matrix<double, M, M>& R,
                       Eigen::Matrix<double, M, N> K) {
  const Eigen::Matrix<double, M, M> Rinv = R.inverse();
  Mat<N> P = Mat<N>::Zero();
  for (int it = 0; it < kMaxNewtonIterations; ++it) {
    const Mat<N> Ak = A - B * K;
    const Mat<N> rhs = Q + K.transpose() * R * K;
    const Mat<N> next = solve_lyapunov<N>(Ak, rhs);
    const double change = (next - P).norm();
    P = next;
    K = Rinv * B.transpose() * P;
    if (it > 0 && change <= 1e-14 * std::max(1.0, P.norm())) {
      return P;
    }
  }
  std::ostringstream os;
  os << "solve_care: Newton-Kleinman did not converge in " << kMaxNewtonIterations
     << " iterations (are the weights detectable?)";
  throw NumericalError(os.str());
}

/// Single-input pole placement at {-1, -2} by Ackermann's formula.
Eigen::RowVector2d place_two_state(const Mat<2>& A, const Eigen::Vector2d& b) {
  Mat<2> ctrb;
  ctrb << b, A * b;
  if (std::abs(ctrb.determinant()) < 1e-12) {
    throw NumericalError("solve_care: yaw subsystem not controllable");
  }
  const Mat<2> phi = A * A + 3.0 * A + 2.0 * Mat<2>::Identity();
  return Eigen::RowVector2d(0.0, 1.0) * ctrb.inverse() * phi;
}

/// Stabilizing root of 2 a p - (b^2 / r) p^2 + q = 0.
double scalar_care(double a, double b, double q, double r) {
  if (b == 0.0) {
    throw NumericalError("solve_care: surge input has no authority");
  }
  const double b2 = b * b;
  return r * (a + std::sqrt(a * a + b2 * q / r)) / b2;
}

bool plant_structure(const Mat3& A, const Mat32& B) {
  return A(0, 1) == 0.0 && A(0, 2) == 0.0 && A(1, 0) == 0.0 && A(2, 0) == 0.0 &&
         B(0, 1) == 0.0 && B(1, 0) == 0.0 && B(2, 0) == 0.0;
}

bool weights_decouple(const LqrWeights& w) {
  return w.Q(0, 1) == 0.0 && w.Q(0, 2) == 0.0 && w.R(0, 1) == 0.0;
}

} // namespace

void LqrWeights::validate() const {
  if (!Q.allFinite() || !R.allFinite()) {
    throw ConfigError("lqr: weights must be finite");
  }
  if ((Q - Q.transpose()).norm() > kSymmetryTol * std::max(1.0, Q.norm()) ||
      (R - R.transpose()).norm() > kSymmetryTol * std::max(1.0, R.norm())) {
    throw ConfigError("lqr: Q and R must be symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Mat3> qe(Q);
  if (qe.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, Q.norm())) {
    throw ConfigError("lqr: Q must be positive semi-definite");
  }
  const Eigen::SelfAdjointEigenSolver<Mat2> re(R);
  if (!(re.eigenvalues().minCoeff() > 0.0)) {
    throw ConfigError("lqr: R must be positive definite");
  }
}

Mat3 plant_a() {
  Mat3 A = Mat3::Zero();
  A(1, 2) = 1.0;
  return A;
}

Mat32 plant_b(const UsvParams& params) {
  Mat32 B = Mat32::Zero();
  B(0, 0) = 1.0 / params.m;
  B(2, 1) = params.l / params.izz;
  return B;
}

Mat3 solve_care(const Mat3& A, const Mat32& B, const LqrWeights& w) {
  w.validate();
  if (!plant_structure(A, B)) {
    throw ConfigError("solve_care: (A, B) must split into surge and yaw subsystems");
  }
  const Mat2 Ay = A.bottomRightCorner<2, 2>();
  const Eigen::Vector2d by = B.block<2, 1>(1, 1);

  if (weights_decouple(w)) {
    Mat3 P = Mat3::Zero();
    P(0, 0) = scalar_care(A(0, 0), B(0, 0), w.Q(0, 0), w.R(0, 0));
    const Mat2 Qy = w.Q.bottomRightCorner<2, 2>();
    if (Qy.isZero(0.0)) {
      return P; // P = 0 solves the yaw block exactly
    }
    const Eigen::Matrix<double, 1, 1> Ry(w.R(1, 1));
    const Eigen::RowVector2d k0 = place_two_state(Ay, by);
    P.bottomRightCorner<2, 2>() =
        newton_kleinman<2, 1>(Ay, by, Qy, Ry, Eigen::Matrix<double, 1, 2>(k0));
    return P;
  }

  if (w.Q.isZero(0.0)) {
    return Mat3::Zero();
  }
  // Coupled weights: full problem from a block-diagonal stabilizing gain.
  Mat23 K0 = Mat23::Zero();
  K0(0, 0) = (A(0, 0) + 1.0) / B(0, 0);
  K0.block<1, 2>(1, 1) = place_two_state(Ay, by);
  return newton_kleinman<3, 2>(A, B, w.Q, w.R, K0);
}

double care_residual(const Mat3& A, const Mat32& B, const LqrWeights& w, const Mat3& P) {
  const Mat3 res = A.transpose() * P + P * A -
                   P * B * w.R.inverse() * B.transpose() * P + w.Q;
  return res.norm();
}

Eigen::Vector3cd closed_loop_eigenvalues(const Mat3& A, const Mat32& B, const Mat23& K) {
  const Eigen::EigenSolver<Mat3> es(A - B * K, false);
  return es.eigenvalues();
}

LqrGain lqr_gain(const UsvParams& params, const LqrWeights& w) {
  params.validate();
  const Mat3 A = plant_a();
  const Mat32 B = plant_b(params);
  LqrGain g;
  g.P = solve_care(A, B, w);
  g.K = w.R.inverse() * B.transpose() * g.P;
  const Eigen::Vector3cd eig = closed_loop_eigenvalues(A, B, g.K);
  if (!(eig.real().maxCoeff() < 0.0)) {
    throw NumericalError("lqr_gain: closed loop is not asymptotically stable for these weights");
  }
  return g;
}

} // namespace helm
