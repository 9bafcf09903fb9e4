#pragma once

// Image-space visual servoing: pixel error to body-frame yaw error, LiDAR
// range to distance error and reference speed, plus the lost-target policy.

#include <optional>
#include <string_view>

#include "helm/core.hpp"
#include "helm/sensors.hpp"

namespace helm {

struct PixelError {
  double ex_px = 0.0; // desired - actual, + when the target is left of center
  double ey_px = 0.0;
};

enum class GuidanceMode { Tracking, Holding, Searching };
enum class SpeedLaw { Proportional, StopAtD };

std::string_view to_string(GuidanceMode mode);
std::string_view to_string(SpeedLaw law);
SpeedLaw parse_speed_law(std::string_view text);

struct GuidanceCommand {
  double u_ref = 0.0; // m/s
  double e_psi = 0.0; // rad, + = target to port
  double e_y = 0.0;   // vertical pixel error over fx (logged, not controlled)
  double e_d = 0.0;   // m, desired minus measured range
  GuidanceMode mode = GuidanceMode::Searching;
};

struct GuidanceConfig {
  double standoff = 10.0;  // D, m
  double max_range = 50.0; // LiDAR R_max, m
  double u_max = 1.5;      // m/s
  int lost_frames_threshold = 10;
  double search_yaw_bias = 0.3; // rad
  double holding_decay = 0.9;
  SpeedLaw speed_law = SpeedLaw::Proportional;

  void validate() const;
};

/// Throws DomainError when the point lies outside the image.
PixelError pixel_error(const BoundingBox& box, const CameraIntrinsics& cam);

double pixel_to_body(const PixelError& e, const CameraIntrinsics& cam);

double distance_error(double range, const GuidanceConfig& cfg);

/// Forward speed reference for the measured range (nothing = beyond LiDAR).
double reference_speed(std::optional<double> range, const GuidanceConfig& cfg);

/// Stateful guidance: TRACKING on a valid detection, HOLDING for up to
/// lost_frames_threshold consecutive misses, SEARCHING afterwards.
class Guidance {
public:
  Guidance(GuidanceConfig cfg, CameraIntrinsics cam);

  GuidanceCommand step(const Detection& det, std::optional<double> range);
  void reset();

  int lost_counter() const { return lost_; }

private:
  GuidanceConfig cfg_;
  CameraIntrinsics cam_;
  int lost_ = 0;
  GuidanceCommand last_;
  double last_seen_e_psi_ = 0.0;
  double last_e_d_ = 0.0;
};

} // namespace helm
