#include "helm/control.hpp"

#include <algorithm>
#include <string>

namespace helm {

void PidGains::validate() const {
  for (const PidAxisGains* g : {&surge, &yaw}) {
    if (g->kp < 0.0 || g->ki < 0.0 || g->kd < 0.0) {
      throw ConfigError("controller: PID gains must be non-negative");
    }
  }
  if (!(integral_limit > 0.0)) {
    throw ConfigError("controller: integral_limit must be positive");
  }
  if (!(derivative_filter_tau >= 0.0)) {
    throw ConfigError("controller: derivative_filter_tau must be non-negative");
  }
}

namespace {

double pid_axis(PidAxisMemory& mem, double e, double dt, const PidAxisGains& g, double limit,
                double tau) {
  mem.integral = std::clamp(mem.integral + e * dt, -limit, limit);
  const double raw = mem.primed ? (e - mem.prev_error) / dt : 0.0;
  mem.derivative += (dt / (tau + dt)) * (raw - mem.derivative);
  mem.prev_error = e;
  mem.primed = true;
  return g.kp * e + g.ki * mem.integral + g.kd * mem.derivative;
}

} // namespace

GeneralizedThrust pid_step(PidState& state, double e_u, double e_psi, double dt,
                           const PidGains& gains) {
  if (!(dt > 0.0)) {
    throw DomainError("pid_step: dt must be positive");
  }
  const double yaw_error = wrap_angle(e_psi);
  return {pid_axis(state.surge, e_u, dt, gains.surge, gains.integral_limit,
                   gains.derivative_filter_tau),
          pid_axis(state.yaw, yaw_error, dt, gains.yaw, gains.integral_limit,
                   gains.derivative_filter_tau)};
}

// ---------------------------------------------------------------- SMC

std::string_view to_string(SmcSwitching mode) {
  return mode == SmcSwitching::Stabilizing ? "stabilizing" : "reversed";
}

SmcSwitching parse_smc_switching(std::string_view text) {
  if (text == "stabilizing") {
    return SmcSwitching::Stabilizing;
  }
  if (text == "reversed") {
    return SmcSwitching::Reversed;
  }
  throw ConfigError("controller: unknown smc_switching '" + std::string(text) + "'");
}

void SmcGains::validate() const {
  if (!(lambda_u > 0.0 && eta_u > 0.0 && lambda_psi > 0.0 && eta_psi > 0.0)) {
    throw ConfigError("controller: SMC lambda and eta must be positive");
  }
  if (!(boundary_layer >= 0.0) || !(reference_filter_tau >= 0.0)) {
    throw ConfigError("controller: SMC boundary layer and filter tau must be non-negative");
  }
}

double smc_switch(double s, double phi) {
  if (phi == 0.0) {
    return static_cast<double>((s > 0.0) - (s < 0.0));
  }
  return std::clamp(s / phi, -1.0, 1.0);
}

GeneralizedThrust smc_step(const SmcReferences& refs, const StateMeasurement& meas,
                           double u_dot_est, const SmcGains& gains, const UsvParams& params) {
  const double sign = gains.switching == SmcSwitching::Stabilizing ? 1.0 : -1.0;

  const double e_u = refs.u_des - meas.u;
  const double s_u = gains.lambda_u * e_u + refs.u_dot_des - u_dot_est;
  const double t1 = params.m * (refs.u_dot_des + gains.lambda_u * e_u) +
                    sign * gains.eta_u * smc_switch(s_u, gains.boundary_layer);

  const double e_psi = wrap_angle(refs.psi_des - meas.psi);
  const double s_psi = gains.lambda_psi * e_psi + refs.psi_dot_des - meas.r;
  const double t2 = params.izz * (refs.r_dot_des + gains.lambda_psi * e_psi) +
                    sign * gains.eta_psi * smc_switch(s_psi, gains.boundary_layer);
  return {t1, t2};
}

double RateEstimator::update(double value, double dt) {
  if (primed_) {
    const double delta = angular_ ? wrap_angle(value - prev_) : value - prev_;
    rate_ += (dt / (tau_ + dt)) * (delta / dt - rate_);
  }
  prev_ = value;
  primed_ = true;
  return rate_;
}

void RateEstimator::reset() {
  primed_ = false;
  prev_ = 0.0;
  rate_ = 0.0;
}

SmcReferenceShaper::SmcReferenceShaper(double tau)
    : u_des_rate_(tau), psi_des_rate_(tau, true), psi_dot_des_rate_(tau), u_meas_rate_(tau) {}

SmcReferences SmcReferenceShaper::update(double u_des, double psi_des, double u_meas, double dt) {
  SmcReferences refs;
  refs.u_des = u_des;
  refs.psi_des = psi_des;
  refs.u_dot_des = u_des_rate_.update(u_des, dt);
  refs.psi_dot_des = psi_des_rate_.update(psi_des, dt);
  refs.r_dot_des = psi_dot_des_rate_.update(refs.psi_dot_des, dt);
  u_meas_rate_.update(u_meas, dt);
  return refs;
}

void SmcReferenceShaper::reset() {
  u_des_rate_.reset();
  psi_des_rate_.reset();
  psi_dot_des_rate_.reset();
  u_meas_rate_.reset();
}

// ---------------------------------------------------------------- LQR

GeneralizedThrust lqr_step(const LqrGain& gain, const StateMeasurement& meas, double u_ref,
                           double psi_ref) {
  const Eigen::Vector3d x(meas.u - u_ref, wrap_angle(meas.psi - psi_ref), meas.r);
  const Eigen::Vector2d u = -gain.K * x;
  return {u(0), u(1)};
}

// ------------------------------------------------ closed-loop adapters

std::string_view to_string(ControllerType type) {
  switch (type) {
  case ControllerType::Pid:
    return "pid";
  case ControllerType::Smc:
    return "smc";
  case ControllerType::Lqr:
    return "lqr";
  }
  return "?";
}

ControllerType parse_controller_type(std::string_view text) {
  if (text == "pid") {
    return ControllerType::Pid;
  }
  if (text == "smc") {
    return ControllerType::Smc;
  }
  if (text == "lqr") {
    return ControllerType::Lqr;
  }
  throw ConfigError("controller: unknown type '" + std::string(text) + "'");
}

namespace {

class PidController final : public TrackingController {
public:
  explicit PidController(PidGains gains) : gains_(gains) { gains_.validate(); }

  GeneralizedThrust update(const ControlInput& in) override {
    return pid_step(state_, in.u_ref - in.meas.u, in.e_psi, in.dt, gains_);
  }
  void reset() override { state_.reset(); }
  ControllerType type() const override { return ControllerType::Pid; }

private:
  PidGains gains_;
  PidState state_;
};

class SmcController final : public TrackingController {
public:
  SmcController(SmcGains gains, UsvParams params)
      : gains_(gains), params_(params), shaper_(gains.reference_filter_tau) {
    gains_.validate();
  }

  GeneralizedThrust update(const ControlInput& in) override {
    const SmcReferences refs = shaper_.update(in.u_ref, in.psi_ref, in.meas.u, in.dt);
    return smc_step(refs, in.meas, shaper_.u_dot_est(), gains_, params_);
  }
  void reset() override { shaper_.reset(); }
  ControllerType type() const override { return ControllerType::Smc; }

private:
  SmcGains gains_;
  UsvParams params_;
  SmcReferenceShaper shaper_;
};

class LqrController final : public TrackingController {
public:
  LqrController(const LqrWeights& w, const UsvParams& params) : gain_(lqr_gain(params, w)) {}

  GeneralizedThrust update(const ControlInput& in) override {
    return lqr_step(gain_, in.meas, in.u_ref, in.psi_ref);
  }
  void reset() override {}
  ControllerType type() const override { return ControllerType::Lqr; }

private:
  LqrGain gain_;
};

} // namespace

std::unique_ptr<TrackingController> make_controller(const ControllerSpec& spec,
                                                    const UsvParams& params) {
  switch (spec.type) {
  case ControllerType::Pid:
    return std::make_unique<PidController>(spec.pid);
  case ControllerType::Smc:
    return std::make_unique<SmcController>(spec.smc, params);
  case ControllerType::Lqr:
    return std::make_unique<LqrController>(spec.lqr, params);
  }
  throw ConfigError("controller: unknown type");
}

} // namespace helm
