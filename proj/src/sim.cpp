#include "helm/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace helm {

Pose2D target_pose(const TrajectorySpec& spec, double t) {
  if (!(t >= 0.0)) {
    throw DomainError("target_pose: t must be non-negative");
  }
  switch (spec.kind) {
  case TrajectoryKind::Stationary:
    return spec.origin;
  case TrajectoryKind::Line: {
    const double s = spec.speed * t;
    return Pose2D(spec.origin.x + s * std::cos(spec.origin.psi),
                  spec.origin.y + s * std::sin(spec.origin.psi), spec.origin.psi);
  }
  case TrajectoryKind::Triangle:
    break;
  }

  const auto& v = spec.vertices;
  double lengths[3];
  double perimeter = 0.0;
  for (int k = 0; k < 3; ++k) {
    lengths[k] = std::hypot(v[(k + 1) % 3].x - v[k].x, v[(k + 1) % 3].y - v[k].y);
    perimeter += lengths[k];
  }
  double s = std::fmod(spec.speed * t, perimeter);
  int edge = 0;
  while (edge < 2 && s >= lengths[edge]) {
    s -= lengths[edge];
    ++edge;
  }
  const Vec2& a = v[edge];
  const Vec2& b = v[(edge + 1) % 3];
  const double frac = std::min(1.0, s / lengths[edge]);
  return Pose2D(a.x + frac * (b.x - a.x), a.y + frac * (b.y - a.y), std::atan2(b.y - a.y, b.x - a.x));
}

namespace {

bool finite(const GeneralizedThrust& g) {
  return std::isfinite(g.total) && std::isfinite(g.differential);
}

std::unique_ptr<Tracker> make_tracker(const Scenario& s) {
  if (s.tracker.kind == TrackerKind::Ncc) {
    return std::make_unique<NccTracker>(s.tracker.ncc);
  }
  return std::make_unique<EmulatedTracker>(s.tracker.noise, Rng::stream(s.seed, "tracker"));
}

} // namespace

RunLog run_scenario(const Scenario& s) {
  s.validate();
  RunLog log;
  log.name = s.name;
  log.dt = s.dt;
  const std::size_t n = s.record_count();
  log.records.reserve(n);

  Rng render_rng = Rng::stream(s.seed, "render");
  Rng lidar_rng = Rng::stream(s.seed, "lidar");
  Rng state_rng = Rng::stream(s.seed, "state");

  std::unique_ptr<Tracker> tracker = make_tracker(s);
  Guidance guidance(s.guidance, s.camera);
  std::unique_ptr<TrackingController> controller = make_controller(s.controller, s.usv);

  BodyState state = s.initial;
  Detection held;
  for (std::size_t k = 0; k < n; ++k) {
    StepRecord rec;
    rec.t = static_cast<double>(k) * s.dt;
    rec.state = state;
    rec.target = target_pose(s.target, rec.t);
    rec.gt_box = project_target(state.pose, rec.target, s.tracker.render.target_extent, s.camera);

    if (k % static_cast<std::size_t>(s.frame_stride) == 0) {
      TrackerInput input;
      input.truth = rec.gt_box;
      input.visibility = s.sea.visibility;
      Frame frame;
      if (s.tracker.kind == TrackerKind::Ncc) {
        frame = render_frame(state.pose, rec.target, s.camera, s.sea, s.tracker.render, render_rng);
        input.frame = &frame;
      }
      held = tracker->track(static_cast<int>(k), input);
    }
    rec.detection = held;
    rec.lidar = lidar_range(state.pose, rec.target, s.guidance.max_range, s.sensors.lidar_sigma,
                            lidar_rng);
    const StateMeasurement meas = measure_state(state, s.sensors.state, state_rng);
    rec.command = guidance.step(rec.detection, rec.lidar);
    rec.psi_ref = wrap_angle(meas.psi + rec.command.e_psi);

    ControlInput in;
    in.u_ref = rec.command.u_ref;
    in.psi_ref = rec.psi_ref;
    in.e_psi = rec.command.e_psi;
    in.meas = meas;
    in.dt = s.dt;
    rec.commanded = controller->update(in);
    if (!finite(rec.commanded)) {
      log.error = "controller produced non-finite thrust at t=" + std::to_string(rec.t);
      return log;
    }
    rec.applied = saturate(mix(rec.commanded), s.usv);
    log.records.push_back(rec);

    if (k + 1 < n) {
      try {
        state = step(state, rec.applied, s.sea, rec.t, s.dt, s.usv);
      } catch (const NumericalError& e) {
        log.error = e.what();
        return log;
      }
    }
  }
  return log;
}

double settling_time(const std::vector<double>& t, const std::vector<double>& e, double band) {
  if (t.empty()) {
    return std::numeric_limits<double>::infinity();
  }
  std::size_t k = e.size();
  while (k > 0 && std::abs(e[k - 1]) <= band) {
    --k;
  }
  if (k == e.size()) {
    return std::numeric_limits<double>::infinity();
  }
  return t[k] - t.front();
}

double overshoot_percent(const std::vector<double>& e) {
  if (e.empty() || std::abs(e.front()) < 1e-9) {
    return 0.0;
  }
  const double e0 = e.front();
  const double sign = e0 > 0.0 ? 1.0 : -1.0;
  double worst = 0.0;
  for (double v : e) {
    worst = std::max(worst, -sign * v);
  }
  return 100.0 * worst / std::abs(e0);
}

double total_variation(const std::vector<double>& x) {
  double tv = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    tv += std::abs(x[i] - x[i - 1]);
  }
  return tv;
}

RunSummary summarize(const RunLog& log, const CostWeights& w) {
  RunSummary out;
  out.aborted = log.error.has_value();
  std::vector<double> t, e, left, right;
  for (const StepRecord& r : log.records) {
    left.push_back(r.applied.left);
    right.push_back(r.applied.right);
  }
  // The yaw response starts at the first frame the target is tracked.
  const auto first = std::find_if(log.records.begin(), log.records.end(), [](const StepRecord& r) {
    return r.command.mode == GuidanceMode::Tracking;
  });
  for (auto it = first; it != log.records.end(); ++it) {
    t.push_back(it->t);
    e.push_back(it->command.e_psi);
  }
  out.settling_time = settling_time(t, e, kSettleBand);
  out.overshoot_pct = overshoot_percent(e);

  const std::size_t half = log.records.size() / 2;
  double ss = 0.0;
  for (std::size_t k = half; k < log.records.size(); ++k) {
    ss += log.records[k].command.e_psi * log.records[k].command.e_psi;
  }
  const std::size_t count = log.records.size() - half;
  out.ss_rms_e_psi = count > 0 ? std::sqrt(ss / static_cast<double>(count)) : 0.0;

  out.tv_left = total_variation(left);
  out.tv_right = total_variation(right);
  out.tv_total = out.tv_left + out.tv_right;
  out.cost = log.records.size() >= 2 ? tracking_cost(log, w) : 0.0;
  return out;
}

} // namespace helm
