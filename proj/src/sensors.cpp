#include "helm/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace helm {

std::optional<BoundingBox> project_target(const Pose2D& usv, const Pose2D& target,
                                          double target_extent, const CameraIntrinsics& cam) {
  if (!(target_extent > 0.0)) {
    throw DomainError("project_target: target extent must be positive");
  }
  const double dx = target.x - usv.x;
  const double dy = target.y - usv.y;
  const double range = std::hypot(dx, dy);
  if (range <= 0.1) {
    return std::nullopt;
  }
  const double bearing = wrap_angle(std::atan2(dy, dx) - usv.psi);
  if (std::abs(bearing) >= 0.5 * cam.hfov()) {
    return std::nullopt;
  }
  const double side = cam.fx() * target_extent / range;
  const double center_x = cam.cx() - cam.fx() * std::tan(bearing);
  const BoundingBox raw = BoundingBox::from_center(center_x, cam.cy(), side, side);

  const double x0 = std::max(raw.x, 0.0);
  const double y0 = std::max(raw.y, 0.0);
  const double x1 = std::min(raw.x + raw.w, static_cast<double>(cam.width()));
  const double y1 = std::min(raw.y + raw.h, static_cast<double>(cam.height()));
  if (x1 <= x0 || y1 <= y0) {
    return std::nullopt;
  }
  return BoundingBox{x0, y0, x1 - x0, y1 - y0};
}

void EmulatorNoise::validate() const {
  if (!(sigma_center_px >= 0.0) || !(sigma_scale >= 0.0)) {
    throw ConfigError("tracker: emulator sigmas must be non-negative");
  }
  if (!(p_drop_base >= 0.0 && p_drop_base < 1.0)) {
    throw ConfigError("tracker: p_drop_base must lie in [0, 1)");
  }
}

double emulator_drop_probability(double visibility, const EmulatorNoise& noise) {
  return 1.0 - (1.0 - noise.p_drop_base) * std::clamp(visibility, 0.0, 1.0);
}

Detection emulate_tracker(const std::optional<BoundingBox>& truth, double visibility,
                          const EmulatorNoise& noise, Rng& rng, int frame_index) {
  noise.validate();
  Detection det;
  det.frame_index = frame_index;
  if (!truth) {
    return det;
  }
  const double p_drop = emulator_drop_probability(visibility, noise);
  if (rng.uniform() < p_drop) {
    return det;
  }
  const double sigma_c = noise.sigma_center_px / visibility;
  const double cx = truth->center_x() + rng.gaussian(sigma_c);
  const double cy = truth->center_y() + rng.gaussian(sigma_c);
  const double scale = std::max(0.0, 1.0 + rng.gaussian(noise.sigma_scale));
  det.box = BoundingBox::from_center(cx, cy, truth->w * scale, truth->h * scale);
  det.valid = true;
  det.score = 1.0;
  return det;
}

Frame render_frame(const Pose2D& usv, const Pose2D& target, const CameraIntrinsics& cam,
                   const SeaState& sea, const RenderConfig& cfg, Rng& rng) {
  const int width = cam.width();
  const int height = cam.height();
  Frame frame(width, height, cfg.background);

  if (const auto box = project_target(usv, target, cfg.target_extent, cam)) {
    // Pixel (i, j) is covered when its center (i + 0.5, j + 0.5) lies in the box.
    const int i0 = std::max(0, static_cast<int>(std::ceil(box->x - 0.5)));
    const int i1 = std::min(width, static_cast<int>(std::ceil(box->x + box->w - 0.5)));
    const int j0 = std::max(0, static_cast<int>(std::ceil(box->y - 0.5)));
    const int j1 = std::min(height, static_cast<int>(std::ceil(box->y + box->h - 0.5)));
    for (int j = j0; j < j1; ++j) {
      std::fill(frame.row(j) + i0, frame.row(j) + std::max(i0, i1), cfg.target);
    }
  }

  const double v = std::clamp(sea.visibility, 0.0, 1.0);
  const double sigma = cfg.pixel_noise_sigma + cfg.dust_noise_sigma * (1.0 - v);
  for (float& px : frame.pixels()) {
    double value = v * px + (1.0 - v) * cfg.haze;
    if (sigma > 0.0) {
      value += sigma * rng.gaussian();
    }
    px = static_cast<float>(std::clamp(value, 0.0, 1.0));
  }
  return frame;
}

NccMatch ncc_search(const Frame& frame, const NccTemplate& tmpl, int prev_x, int prev_y,
                    int radius, SimdLevel level) {
  NccMatch best{prev_x, prev_y, 0.0};
  const int x_lo = std::max(0, prev_x - radius);
  const int x_hi = std::min(frame.width() - tmpl.width, prev_x + radius);
  const int y_lo = std::max(0, prev_y - radius);
  const int y_hi = std::min(frame.height() - tmpl.height, prev_y + radius);
  if (x_hi < x_lo || y_hi < y_lo || tmpl.degenerate()) {
    return best;
  }
  const PlacementGrid grid{x_lo, y_lo, x_hi - x_lo + 1, y_hi - y_lo + 1};
  std::vector<double> scores(static_cast<std::size_t>(grid.nx) * grid.ny);
  ncc_response(frame, tmpl, grid, scores, level);

  const auto it = std::max_element(scores.begin(), scores.end()); // first maximum
  const auto idx = static_cast<int>(it - scores.begin());
  best.x = grid.x0 + idx % grid.nx;
  best.y = grid.y0 + idx / grid.nx;
  best.score = *it;
  const auto at = [&](int gx, int gy) { return scores[static_cast<std::size_t>(gy) * grid.nx + gx]; };
  const int gx = idx % grid.nx;
  const int gy = idx / grid.nx;
  if (gx > 0 && gx + 1 < grid.nx) {
    best.dx = parabolic_peak_offset(at(gx - 1, gy), best.score, at(gx + 1, gy));
  }
  if (gy > 0 && gy + 1 < grid.ny) {
    best.dy = parabolic_peak_offset(at(gx, gy - 1), best.score, at(gx, gy + 1));
  }
  return best;
}

double parabolic_peak_offset(double left, double center, double right) {
  const double curvature = left - 2.0 * center + right;
  if (!(center > left && center >= right) && !(center >= left && center > right)) {
    return 0.0;
  }
  if (!(curvature < 0.0)) {
    return 0.0;
  }
  return std::clamp(0.5 * (left - right) / curvature, -0.5, 0.5);
}

EmulatedTracker::EmulatedTracker(EmulatorNoise noise, Rng rng)
    : noise_(noise), initial_rng_(rng), rng_(rng) {
  noise_.validate();
}

Detection EmulatedTracker::track(int frame_index, const TrackerInput& input) {
  return emulate_tracker(input.truth, input.visibility, noise_, rng_, frame_index);
}

void EmulatedTracker::reset() { rng_ = initial_rng_; }

NccTracker::NccTracker(NccConfig cfg, SimdLevel level) : cfg_(cfg), level_(level) {
  if (cfg_.search_radius < 1 || cfg_.template_margin < 0) {
    throw ConfigError("tracker: ncc search radius must be >= 1 and margin >= 0");
  }
}

void NccTracker::reset() {
  initialized_ = false;
  tmpl_ = {};
}

void NccTracker::initialize(const Frame& frame, const BoundingBox& box) {
  const int m = cfg_.template_margin;
  const int x0 = std::max(0, static_cast<int>(std::floor(box.x)) - m);
  const int y0 = std::max(0, static_cast<int>(std::floor(box.y)) - m);
  const int x1 = std::min(frame.width(), static_cast<int>(std::ceil(box.x + box.w)) + m);
  const int y1 = std::min(frame.height(), static_cast<int>(std::ceil(box.y + box.h)) + m);
  if (x1 <= x0 || y1 <= y0) {
    throw DomainError("NccTracker: initial box lies outside the frame");
  }
  tmpl_ = NccTemplate::from_frame(frame.crop(x0, y0, x1 - x0, y1 - y0));
  tmpl_x_ = x0;
  tmpl_y_ = y0;
  box_offset_ = {box.x - x0, box.y - y0, box.w, box.h};
  initialized_ = true;
}

Detection NccTracker::track(int frame_index, const TrackerInput& input) {
  Detection det;
  det.frame_index = frame_index;
  if (input.frame == nullptr) {
    throw DomainError("NccTracker: image input required");
  }
  if (!initialized_) {
    if (!input.truth) {
      return det;
    }
    initialize(*input.frame, *input.truth);
    det.box = *input.truth;
    det.valid = !tmpl_.degenerate();
    det.score = det.valid ? 1.0 : 0.0;
    return det;
  }
  det.box = {tmpl_x_ + box_offset_.x, tmpl_y_ + box_offset_.y, box_offset_.w, box_offset_.h};
  if (tmpl_.degenerate()) {
    return det;
  }
  const NccMatch match = ncc_search(*input.frame, tmpl_, tmpl_x_, tmpl_y_, cfg_.search_radius, level_);
  det.score = match.score;
  if (match.score < cfg_.threshold) {
    return det;
  }
  tmpl_x_ = match.x;
  tmpl_y_ = match.y;
  det.box.x = tmpl_x_ + match.dx + box_offset_.x;
  det.box.y = tmpl_y_ + match.dy + box_offset_.y;
  det.valid = true;
  return det;
}

std::optional<double> lidar_range(const Pose2D& usv, const Pose2D& target, double max_range,
                                  double sigma, Rng& rng) {
  if (!(max_range > 0.0) || !(sigma >= 0.0)) {
    throw DomainError("lidar_range: max_range must be positive and sigma non-negative");
  }
  const double range = std::hypot(target.x - usv.x, target.y - usv.y);
  if (range > max_range) {
    return std::nullopt;
  }
  return std::max(0.0, range + rng.gaussian(sigma));
}

StateMeasurement measure_state(const BodyState& truth, const StateNoise& noise, Rng& rng) {
  if (noise.sigma_u < 0.0 || noise.sigma_psi < 0.0 || noise.sigma_r < 0.0) {
    throw DomainError("measure_state: sigmas must be non-negative");
  }
  StateMeasurement m;
  m.u = truth.u + rng.gaussian(noise.sigma_u);
  m.psi = wrap_angle(truth.pose.psi + rng.gaussian(noise.sigma_psi));
  m.r = truth.r + rng.gaussian(noise.sigma_r);
  return m;
}

} // namespace helm
