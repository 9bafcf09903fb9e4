#pragma once

// Tracking controllers mapping guidance references to generalized thrust
// (T1 total, T2 differential): PID, sliding mode and LQR.

#include <memory>
#include <string_view>

#include <Eigen/Dense>

#include "helm/core.hpp"
#include "helm/dynamics.hpp"
#include "helm/sensors.hpp"

namespace helm {

// ---------------------------------------------------------------- PID

struct PidAxisGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
};

struct PidGains {
  PidAxisGains surge{40.0, 2.0, 5.0};
  PidAxisGains yaw{8.0, 0.2, 4.0};
  double integral_limit = 50.0;       // symmetric clamp on each accumulated integral
  double derivative_filter_tau = 0.05; // s, 0 disables the low-pass

  void validate() const;
};

struct PidAxisMemory {
  double integral = 0.0;
  double prev_error = 0.0;
  double derivative = 0.0; // filtered
  bool primed = false;
};

struct PidState {
  PidAxisMemory surge;
  PidAxisMemory yaw;
  void reset() { *this = {}; }
};

/// Rectangular integral with anti-windup clamp and a low-pass filtered
/// backward-difference derivative. The first call after reset sees a zero
/// derivative. e_psi is wrapped before use. Throws DomainError for dt <= 0.
GeneralizedThrust pid_step(PidState& state, double e_u, double e_psi, double dt,
                           const PidGains& gains);

// ---------------------------------------------------------------- SMC

enum class SmcSwitching {
  Stabilizing, // T = T_eq + eta * sw(s): drives s toward zero
  Reversed,    // T = T_eq - eta * sw(s): opposite switching sign
};

std::string_view to_string(SmcSwitching mode);
SmcSwitching parse_smc_switching(std::string_view text);

struct SmcGains {
  double lambda_u = 1.5;
  double eta_u = 8.0;
  double lambda_psi = 1.2;
  double eta_psi = 1.5;
  double boundary_layer = 0.05; // phi; 0 selects the pure sign function
  double reference_filter_tau = 0.1; // s, low-pass on differentiated references
  SmcSwitching switching = SmcSwitching::Stabilizing;

  void validate() const;
};

struct SmcReferences {
  double u_des = 0.0;
  double u_dot_des = 0.0;
  double psi_des = 0.0;
  double psi_dot_des = 0.0;
  double r_dot_des = 0.0;
};

/// sgn(s) for phi == 0, otherwise clamp(s / phi, -1, 1).
double smc_switch(double s, double phi);

/// Surge and yaw sliding-mode laws:
///   s_u   = lambda_u (u_des - u) + u_dot_des - u_dot_est
///   T1    = m (u_dot_des + lambda_u (u_des - u)) -+ eta_u sw(s_u)
///   s_psi = lambda_psi (psi_des - psi) + psi_dot_des - r
///   T2    = Izz (r_dot_des + lambda_psi (psi_des - psi)) -+ eta_psi sw(s_psi)
GeneralizedThrust smc_step(const SmcReferences& refs, const StateMeasurement& meas,
                           double u_dot_est, const SmcGains& gains, const UsvParams& params);

/// Backward difference through a first-order low-pass; angles are
/// differenced after wrapping.
class RateEstimator {
public:
  explicit RateEstimator(double tau = 0.1, bool angular = false) : tau_(tau), angular_(angular) {}
  double update(double value, double dt);
  double rate() const { return rate_; }
  void reset();

private:
  double tau_;
  bool angular_;
  bool primed_ = false;
  double prev_ = 0.0;
  double rate_ = 0.0;
};

/// Builds SmcReferences from raw guidance references by numerical
/// differentiation, and estimates u_dot from the measured surge speed.
class SmcReferenceShaper {
public:
  explicit SmcReferenceShaper(double tau = 0.1);
  SmcReferences update(double u_des, double psi_des, double u_meas, double dt);
  double u_dot_est() const { return u_meas_rate_.rate(); }
  void reset();

private:
  RateEstimator u_des_rate_;
  RateEstimator psi_des_rate_;
  RateEstimator psi_dot_des_rate_;
  RateEstimator u_meas_rate_;
};

// ---------------------------------------------------------------- LQR

using Mat3 = Eigen::Matrix3d;
using Mat2 = Eigen::Matrix2d;
using Mat32 = Eigen::Matrix<double, 3, 2>;
using Mat23 = Eigen::Matrix<double, 2, 3>;

struct LqrWeights {
  Mat3 Q = Eigen::Vector3d(4.0, 25.0, 5.0).asDiagonal();
  Mat2 R = Eigen::Vector2d(0.05, 0.05).asDiagonal();

  /// Q symmetric PSD, R symmetric PD; throws ConfigError otherwise.
  void validate() const;
};

struct LqrGain {
  Mat23 K = Mat23::Zero();
  Mat3 P = Mat3::Zero();
};

/// State x = [u, psi, r]; inputs [T1, T2].
Mat3 plant_a();
Mat32 plant_b(const UsvParams& params);

/// Stabilizing solution of A'P + PA - P B R^-1 B' P + Q = 0 for the plant
/// structure. When the weights do not couple surge and yaw the problem
/// splits into a scalar surge equation (closed form) and a two-state yaw
/// equation; otherwise the full three-state problem is solved. Both use
/// Newton-Kleinman iteration from a pole-placement gain.
///
/// Throws ConfigError for invalid weights or an unsupported (A, B)
/// structure, NumericalError if Newton-Kleinman does not converge in 50
/// iterations.
Mat3 solve_care(const Mat3& A, const Mat32& B, const LqrWeights& w);

/// Frobenius norm of the Riccati residual.
double care_residual(const Mat3& A, const Mat32& B, const LqrWeights& w, const Mat3& P);

Eigen::Vector3cd closed_loop_eigenvalues(const Mat3& A, const Mat32& B, const Mat23& K);

/// K = R^-1 B' P for the vehicle. Throws NumericalError when the closed
/// loop is not asymptotically stable.
LqrGain lqr_gain(const UsvParams& params, const LqrWeights& w);

/// u = -K [u - u_ref, wrap(psi - psi_ref), r].
GeneralizedThrust lqr_step(const LqrGain& gain, const StateMeasurement& meas, double u_ref,
                           double psi_ref);

// ------------------------------------------------ closed-loop adapters

enum class ControllerType { Pid, Smc, Lqr };

std::string_view to_string(ControllerType type);
ControllerType parse_controller_type(std::string_view text);

struct ControlInput {
  double u_ref = 0.0;
  double psi_ref = 0.0;
  double e_psi = 0.0; // guidance yaw error; psi_ref = meas.psi + e_psi
  StateMeasurement meas;
  double dt = 0.02;
};

class TrackingController {
public:
  virtual ~TrackingController() = default;
  virtual GeneralizedThrust update(const ControlInput& in) = 0;
  virtual void reset() = 0;
  virtual ControllerType type() const = 0;
};

struct ControllerSpec {
  ControllerType type = ControllerType::Lqr;
  PidGains pid;
  SmcGains smc;
  LqrWeights lqr;
};

std::unique_ptr<TrackingController> make_controller(const ControllerSpec& spec,
                                                    const UsvParams& params);

} // namespace helm
