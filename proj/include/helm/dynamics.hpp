#pragma once

// Two-thruster catamaran plant: surge and yaw driven by total and
// differential thrust, planar kinematics, sinusoidal wave loads and a linear
// wind drift, advanced with fixed-step RK4.

#include "helm/core.hpp"

namespace helm {

struct ThrustPair {
  double left = 0.0;  // T_L, N
  double right = 0.0; // T_R, N
};

struct GeneralizedThrust {
  double total = 0.0;        // T1 = T_L + T_R
  double differential = 0.0; // T2 = T_R - T_L
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct SeaState {
  double wave_gain = 0.0;
  double wave_period = 5.0; // s
  double wave_phase = 0.0;  // rad
  Vec2 wind_velocity;       // m/s, world frame
  double wind_drag_coeff = 0.0; // N s/m; 0 in the calm preset
  double wave_force_amp = 10.0; // N
  double wave_torque_amp = 2.0; // N m
  double visibility = 1.0;      // 1 clear, 0 opaque dust

  static SeaState calm() { return {}; }
  /// Wave gain 0.5, period 5 s, wind (1.5, -5.0) m/s.
  static SeaState rough();

  void validate() const;
};

struct Disturbance {
  double f_surge = 0.0; // N
  double tau_yaw = 0.0; // N m
  Vec2 drift;           // m/s, world frame
};

struct StateDerivative {
  double dx = 0.0;
  double dy = 0.0;
  double dpsi = 0.0;
  double du = 0.0;
  double dr = 0.0;
};

ThrustPair mix(GeneralizedThrust gen);
GeneralizedThrust unmix(ThrustPair pair);
ThrustPair saturate(ThrustPair pair, const UsvParams& params);

Disturbance disturbance_at(double t, const SeaState& sea, const BodyState& state,
                           const UsvParams& params);

/// Right-hand side of the plant. Accelerations are clamped to the
/// vehicle's udot_max and rdot_max.
StateDerivative derivatives(const BodyState& state, ThrustPair pair, const Disturbance& dist,
                            const UsvParams& params);

/// One RK4 step of length dt, 0 < dt <= 0.1. The disturbance is evaluated at
/// t and held over the step. Throws NumericalError on a non-finite result.
BodyState step(const BodyState& state, ThrustPair pair, const SeaState& sea, double t, double dt,
               const UsvParams& params);

} // namespace helm
