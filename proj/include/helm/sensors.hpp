#pragma once

// Synthetic perception: camera projection, rendered frames, the tracker
// port with an error emulator and an NCC template tracker, LiDAR ranging
// and noisy DVL/IMU state measurement.

#include <optional>

#include "helm/core.hpp"
#include "helm/dynamics.hpp"
#include "helm/frame.hpp"
#include "helm/ncc_kernels.hpp"
#include "helm/rng.hpp"

namespace helm {

struct Detection {
  int frame_index = 0;
  BoundingBox box;
  bool valid = false;
  double score = 0.0; // tracker confidence; NCC peak for the template tracker
};

struct StateMeasurement {
  double u = 0.0;   // DVL surge, m/s
  double psi = 0.0; // IMU heading, rad
  double r = 0.0;   // IMU yaw rate, rad/s
};

/// Returns the target's box in the image, or nothing when the target is
/// outside the horizontal field of view or closer than 0.1 m. The box is
/// square with side fx * extent / range, centered on the row cy, and
/// clipped to the image.
std::optional<BoundingBox> project_target(const Pose2D& usv, const Pose2D& target,
                                          double target_extent, const CameraIntrinsics& cam);

struct EmulatorNoise {
  double sigma_center_px = 0.0;
  double sigma_scale = 0.0;
  double p_drop_base = 0.0;

  void validate() const;
};

/// Drop probability used by emulate_tracker.
double emulator_drop_probability(double visibility, const EmulatorNoise& noise);

Detection emulate_tracker(const std::optional<BoundingBox>& truth, double visibility,
                          const EmulatorNoise& noise, Rng& rng, int frame_index = 0);

struct RenderConfig {
  double target_extent = 2.0;      // m
  float background = 0.3f;
  float target = 0.8f;
  float haze = 0.6f;
  double pixel_noise_sigma = 0.02;
  double dust_noise_sigma = 0.10; // extra sensor noise at zero visibility
};

/// Flat sea with the target drawn as a filled box. Pixels whose centers fall
/// inside the projected box take the target intensity; haze then blends the
/// image toward a uniform grey and sensor noise of sigma
/// pixel_noise + dust_noise * (1 - visibility) is added.
Frame render_frame(const Pose2D& usv, const Pose2D& target, const CameraIntrinsics& cam,
                   const SeaState& sea, const RenderConfig& cfg, Rng& rng);

struct NccConfig {
  int search_radius = 16;    // px around the previous placement
  double threshold = 0.2;    // minimum peak score for a valid detection
  int template_margin = 8;   // background border kept around the target
};

struct NccMatch {
  int x = 0; // top-left of the best placement
  int y = 0;
  double score = 0.0;
  double dx = 0.0; // sub-pixel peak offset in [-0.5, 0.5] from a parabola
  double dy = 0.0; // through the three scores around the peak on each axis
};

/// Vertex offset of the parabola through (-1, left), (0, center), (1, right);
/// 0 unless center is a strict local maximum.
double parabolic_peak_offset(double left, double center, double right);

/// Exhaustive search of placements within +-radius of (prev_x, prev_y),
/// restricted to the frame. Ties resolve to the first maximum in row-major
/// order.
NccMatch ncc_search(const Frame& frame, const NccTemplate& tmpl, int prev_x, int prev_y,
                    int radius, SimdLevel level = detected_simd());

/// What a tracker sees on one frame. The emulator consumes the truth box
/// and visibility; the image tracker consumes the frame and uses the truth
/// box only to initialize.
struct TrackerInput {
  const Frame* frame = nullptr;
  std::optional<BoundingBox> truth;
  double visibility = 1.0;
};

class Tracker {
public:
  virtual ~Tracker() = default;
  virtual Detection track(int frame_index, const TrackerInput& input) = 0;
  virtual void reset() = 0;
};

class EmulatedTracker final : public Tracker {
public:
  EmulatedTracker(EmulatorNoise noise, Rng rng);
  Detection track(int frame_index, const TrackerInput& input) override;
  void reset() override;

private:
  EmulatorNoise noise_;
  Rng initial_rng_;
  Rng rng_;
};

class NccTracker final : public Tracker {
public:
  explicit NccTracker(NccConfig cfg = {}, SimdLevel level = detected_simd());
  Detection track(int frame_index, const TrackerInput& input) override;
  void reset() override;

  bool initialized() const { return initialized_; }

  /// Takes the template from `frame` around `box`, padded by the margin and
  /// clipped to the frame.
  void initialize(const Frame& frame, const BoundingBox& box);

private:
  NccConfig cfg_;
  SimdLevel level_;
  bool initialized_ = false;
  NccTemplate tmpl_;
  int tmpl_x_ = 0;
  int tmpl_y_ = 0;
  BoundingBox box_offset_; // target box relative to the template corner
};

/// Noisy range to the target, or nothing beyond max_range. Never negative.
std::optional<double> lidar_range(const Pose2D& usv, const Pose2D& target, double max_range,
                                  double sigma, Rng& rng);

struct StateNoise {
  double sigma_u = 0.0;
  double sigma_psi = 0.0;
  double sigma_r = 0.0;
};

StateMeasurement measure_state(const BodyState& truth, const StateNoise& noise, Rng& rng);

} // namespace helm
