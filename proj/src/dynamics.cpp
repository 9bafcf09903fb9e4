#include "helm/dynamics.hpp"

#include <algorithm>
#include <sstream>

namespace helm {

SeaState SeaState::rough() {
  SeaState s;
  s.wave_gain = 0.5;
  s.wave_period = 5.0;
  s.wind_velocity = {1.5, -5.0};
  s.wind_drag_coeff = 2.0;
  return s;
}

void SeaState::validate() const {
  if (!(wave_period > 0.0)) {
    throw ConfigError("sea: wave_period must be positive");
  }
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw ConfigError("sea: visibility must lie in [0, 1]");
  }
  if (wind_drag_coeff < 0.0 || wave_gain < 0.0) {
    throw ConfigError("sea: gains must be non-negative");
  }
}

ThrustPair mix(GeneralizedThrust gen) {
  return {0.5 * gen.total - 0.5 * gen.differential, 0.5 * gen.total + 0.5 * gen.differential};
}

GeneralizedThrust unmix(ThrustPair pair) {
  return {pair.left + pair.right, pair.right - pair.left};
}

ThrustPair saturate(ThrustPair pair, const UsvParams& params) {
  return {std::clamp(pair.left, params.thrust_min, params.thrust_max),
          std::clamp(pair.right, params.thrust_min, params.thrust_max)};
}

Disturbance disturbance_at(double t, const SeaState& sea, const BodyState& state,
                           const UsvParams& params) {
  Disturbance d;
  if (sea.wave_gain != 0.0) {
    const double arg = kTwoPi * t / sea.wave_period + sea.wave_phase;
    d.f_surge = sea.wave_gain * sea.wave_force_amp * std::sin(arg);
    d.tau_yaw = sea.wave_gain * sea.wave_torque_amp * std::sin(arg + 0.5 * kPi);
  }
  if (sea.wind_drag_coeff != 0.0) {
    const double k = sea.wind_drag_coeff / params.m;
    const double vx = state.u * std::cos(state.pose.psi);
    const double vy = state.u * std::sin(state.pose.psi);
    d.drift = {k * (sea.wind_velocity.x - vx), k * (sea.wind_velocity.y - vy)};
  }
  return d;
}

StateDerivative derivatives(const BodyState& state, ThrustPair pair, const Disturbance& dist,
                            const UsvParams& params) {
  StateDerivative d;
  d.dx = state.u * std::cos(state.pose.psi) + dist.drift.x;
  d.dy = state.u * std::sin(state.pose.psi) + dist.drift.y;
  d.dpsi = state.r;
  d.du = std::clamp((pair.left + pair.right + dist.f_surge) / params.m, -params.udot_max,
                    params.udot_max);
  d.dr = std::clamp(((pair.right - pair.left) * params.l + dist.tau_yaw) / params.izz,
                    -params.rdot_max, params.rdot_max);
  return d;
}

namespace {

// Stage states keep psi unwrapped; only the final state is re-wrapped.
struct RawState {
  double x, y, psi, u, r;
};

RawState advance(const RawState& s, const StateDerivative& k, double h) {
  return {s.x + h * k.dx, s.y + h * k.dy, s.psi + h * k.dpsi, s.u + h * k.du, s.r + h * k.dr};
}

StateDerivative eval(const RawState& s, ThrustPair pair, const Disturbance& dist,
                     const UsvParams& params) {
  BodyState b;
  b.pose.x = s.x;
  b.pose.y = s.y;
  b.pose.psi = s.psi;
  b.u = s.u;
  b.r = s.r;
  return derivatives(b, pair, dist, params);
}

bool finite(const BodyState& s) {
  return std::isfinite(s.pose.x) && std::isfinite(s.pose.y) && std::isfinite(s.pose.psi) &&
         std::isfinite(s.u) && std::isfinite(s.r);
}

} // namespace

BodyState step(const BodyState& state, ThrustPair pair, const SeaState& sea, double t, double dt,
               const UsvParams& params) {
  if (!(dt > 0.0 && dt <= 0.1)) {
    throw DomainError("step: dt must lie in (0, 0.1]");
  }
  if (!finite(state)) {
    std::ostringstream os;
    os << "step: non-finite state at t=" << t << " (u=" << state.u << ", r=" << state.r << ")";
    throw NumericalError(os.str());
  }
  const Disturbance dist = disturbance_at(t, sea, state, params);
  const RawState s0{state.pose.x, state.pose.y, state.pose.psi, state.u, state.r};

  const StateDerivative k1 = eval(s0, pair, dist, params);
  const StateDerivative k2 = eval(advance(s0, k1, 0.5 * dt), pair, dist, params);
  const StateDerivative k3 = eval(advance(s0, k2, 0.5 * dt), pair, dist, params);
  const StateDerivative k4 = eval(advance(s0, k3, dt), pair, dist, params);

  const double w = dt / 6.0;
  auto combine = [w](double a, double b, double c, double d) { return w * (a + 2.0 * b + 2.0 * c + d); };

  BodyState out;
  out.pose.x = s0.x + combine(k1.dx, k2.dx, k3.dx, k4.dx);
  out.pose.y = s0.y + combine(k1.dy, k2.dy, k3.dy, k4.dy);
  const double psi = s0.psi + combine(k1.dpsi, k2.dpsi, k3.dpsi, k4.dpsi);
  out.u = s0.u + combine(k1.du, k2.du, k3.du, k4.du);
  out.r = s0.r + combine(k1.dr, k2.dr, k3.dr, k4.dr);

  if (!finite(out) || !std::isfinite(psi)) {
    std::ostringstream os;
    os << "step: integration produced a non-finite state at t=" << t;
    throw NumericalError(os.str());
  }
  out.pose.psi = wrap_angle(psi);
  out.u = std::clamp(out.u, -params.u_abs_cap, params.u_abs_cap);
  out.r = std::clamp(out.r, -params.r_abs_cap, params.r_abs_cap);
  return out;
}

} // namespace helm
