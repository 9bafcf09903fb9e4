#pragma once

#include <optional>
#include <string>
#include <vector>

#include "helm/core.hpp"
#include "helm/dynamics.hpp"
#include "helm/guidance.hpp"
#include "helm/sensors.hpp"

namespace helm {

/// One closed-loop step. `state` is the plant state at time t, before the
/// commanded thrust is applied over [t, t + dt).
struct StepRecord {
  double t = 0.0;
  BodyState state;
  Pose2D target;
  std::optional<BoundingBox> gt_box;
  Detection detection;
  std::optional<double> lidar;
  GuidanceCommand command;
  double psi_ref = 0.0;
  GeneralizedThrust commanded;
  ThrustPair applied; // after mixing and saturation
};

struct RunLog {
  std::string name;
  double dt = 0.02;
  std::vector<StepRecord> records;
  std::optional<std::string> error; // set when the run aborted early
};

} // namespace helm
