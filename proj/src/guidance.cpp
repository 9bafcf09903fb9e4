#include "helm/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace helm {

std::string_view to_string(GuidanceMode mode) {
  switch (mode) {
  case GuidanceMode::Tracking:
    return "TRACKING";
  case GuidanceMode::Holding:
    return "HOLDING";
  case GuidanceMode::Searching:
    return "SEARCHING";
  }
  return "?";
}

std::string_view to_string(SpeedLaw law) {
  return law == SpeedLaw::Proportional ? "proportional" : "stop_at_d";
}

SpeedLaw parse_speed_law(std::string_view text) {
  if (text == "proportional") {
    return SpeedLaw::Proportional;
  }
  if (text == "stop_at_d") {
    return SpeedLaw::StopAtD;
  }
  throw ConfigError("guidance: unknown speed_law '" + std::string(text) + "'");
}

void GuidanceConfig::validate() const {
  if (!(standoff > 0.0 && standoff < max_range)) {
    throw ConfigError("guidance: need 0 < standoff < max_range");
  }
  if (!(u_max > 0.0)) {
    throw ConfigError("guidance: u_max must be positive");
  }
  if (lost_frames_threshold < 0) {
    throw ConfigError("guidance: lost_frames_threshold must be non-negative");
  }
  if (!(holding_decay >= 0.0 && holding_decay <= 1.0)) {
    throw ConfigError("guidance: holding_decay must lie in [0, 1]");
  }
}

PixelError pixel_error(const BoundingBox& box, const CameraIntrinsics& cam) {
  const double cx = box.center_x();
  const double cy = box.center_y();
  if (!(cx >= 0.0 && cx <= cam.width() && cy >= 0.0 && cy <= cam.height())) {
    throw DomainError("pixel_error: box center outside the image");
  }
  return {cam.cx() - cx, cam.cy() - cy};
}

double pixel_to_body(const PixelError& e, const CameraIntrinsics& cam) {
  return std::atan2(e.ex_px, cam.fx());
}

double distance_error(double range, const GuidanceConfig& cfg) { return cfg.standoff - range; }

double reference_speed(std::optional<double> range, const GuidanceConfig& cfg) {
  if (!range) {
    return cfg.u_max;
  }
  const double d = std::max(0.0, *range);
  if (cfg.speed_law == SpeedLaw::Proportional) {
    return std::clamp(cfg.u_max * d / cfg.standoff, 0.0, cfg.u_max);
  }
  return cfg.u_max * std::clamp((d - cfg.standoff) / (cfg.max_range - cfg.standoff), 0.0, 1.0);
}

Guidance::Guidance(GuidanceConfig cfg, CameraIntrinsics cam) : cfg_(cfg), cam_(cam) {
  cfg_.validate();
}

void Guidance::reset() {
  lost_ = 0;
  last_ = {};
  last_seen_e_psi_ = 0.0;
  last_e_d_ = 0.0;
}

GuidanceCommand Guidance::step(const Detection& det, std::optional<double> range) {
  const double e_d = range ? distance_error(*range, cfg_) : cfg_.standoff - cfg_.max_range;

  const bool in_image = det.valid && det.box.center_x() >= 0.0 &&
                        det.box.center_x() <= cam_.width() && det.box.center_y() >= 0.0 &&
                        det.box.center_y() <= cam_.height();
  if (in_image) {
    const PixelError pe = pixel_error(det.box, cam_);
    GuidanceCommand cmd;
    cmd.mode = GuidanceMode::Tracking;
    cmd.e_psi = pixel_to_body(pe, cam_);
    cmd.e_y = pe.ey_px / cam_.fx();
    cmd.u_ref = reference_speed(range, cfg_);
    cmd.e_d = e_d;
    lost_ = 0;
    last_seen_e_psi_ = cmd.e_psi;
    last_ = cmd;
    return cmd;
  }

  ++lost_;
  GuidanceCommand cmd;
  if (lost_ <= cfg_.lost_frames_threshold) {
    cmd = last_;
    cmd.mode = GuidanceMode::Holding;
    cmd.u_ref = last_.u_ref * cfg_.holding_decay;
  } else {
    cmd.mode = GuidanceMode::Searching;
    cmd.u_ref = 0.0;
    cmd.e_psi = last_seen_e_psi_ < 0.0 ? -cfg_.search_yaw_bias : cfg_.search_yaw_bias;
    cmd.e_y = 0.0;
  }
  cmd.e_d = e_d;
  last_ = cmd;
  return cmd;
}

} // namespace helm
