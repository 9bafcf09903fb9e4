#include "helm/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace helm {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

const std::set<std::string>& known_sections() {
  static const std::set<std::string> s{"",        "usv",     "sea",    "camera", "sensors",
                                       "guidance", "controller", "tracker", "target", "cost"};
  return s;
}

[[noreturn]] void entry_fail(const std::string& source, const ConfigEntry& e,
                             const std::string& what) {
  std::ostringstream os;
  os << source << ":" << e.line << ": ";
  if (!e.section.empty()) {
    os << "[" << e.section << "] ";
  }
  os << e.key << ": " << what;
  throw ConfigError(os.str());
}

double to_double(const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError("expected a finite number, got '" + v + "'");
  }
  return out;
}

long long to_int(const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("expected an integer, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_u64(const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

/// "x1 y1; x2 y2; x3 y3"
std::vector<Vec2> to_points(const std::string& v) {
  std::vector<Vec2> pts;
  std::stringstream all(v);
  std::string item;
  while (std::getline(all, item, ';')) {
    std::istringstream xy(item);
    std::string xs, ys, extra;
    if (!(xy >> xs >> ys) || (xy >> extra)) {
      throw ConfigError("expected 'x y' pairs separated by ';', got '" + trim(item) + "'");
    }
    pts.push_back({to_double(xs), to_double(ys)});
  }
  return pts;
}

struct Builder {
  Scenario s;
  int cam_width = 640;
  int cam_height = 480;
  double cam_fx = 500.0;
  double x0 = 0.0, y0 = 0.0, psi0 = 0.0;
  double tx = 0.0, ty = 0.0, theading = 0.0;
  bool explicit_vertices = false;
  double tri_side = 20.0;
  double tri_ahead = 40.0;
  std::optional<Vec2> tri_centroid;
};

using Setter = std::function<void(Builder&, const std::string&)>;

#define HELM_NUM(field) [](Builder& b, const std::string& v) { b.field = to_double(v); }

const std::map<std::string, std::map<std::string, Setter>>& setters() {
  static const std::map<std::string, std::map<std::string, Setter>> table{
      {"",
       {{"name", [](Builder& b, const std::string& v) { b.s.name = v; }},
        {"duration", HELM_NUM(s.duration)},
        {"dt", HELM_NUM(s.dt)},
        {"seed", [](Builder& b, const std::string& v) { b.s.seed = to_u64(v); }},
        {"frame_stride",
         [](Builder& b, const std::string& v) { b.s.frame_stride = static_cast<int>(to_int(v)); }}}},
      {"usv",
       {{"mass", HELM_NUM(s.usv.m)},
        {"izz", HELM_NUM(s.usv.izz)},
        {"arm", HELM_NUM(s.usv.l)},
        {"u_max", HELM_NUM(s.usv.u_max)},
        {"udot_max", HELM_NUM(s.usv.udot_max)},
        {"rdot_max_deg",
         [](Builder& b, const std::string& v) { b.s.usv.rdot_max = deg_to_rad(to_double(v)); }},
        {"thrust_min", HELM_NUM(s.usv.thrust_min)},
        {"thrust_max", HELM_NUM(s.usv.thrust_max)},
        {"u_abs_cap", HELM_NUM(s.usv.u_abs_cap)},
        {"r_abs_cap", HELM_NUM(s.usv.r_abs_cap)},
        {"x0", HELM_NUM(x0)},
        {"y0", HELM_NUM(y0)},
        {"psi0", HELM_NUM(psi0)},
        {"u0", HELM_NUM(s.initial.u)},
        {"r0", HELM_NUM(s.initial.r)}}},
      {"sea",
       {{"preset", [](Builder&, const std::string&) {}}, // applied before other keys
        {"wave_gain", HELM_NUM(s.sea.wave_gain)},
        {"wave_period", HELM_NUM(s.sea.wave_period)},
        {"wave_phase", HELM_NUM(s.sea.wave_phase)},
        {"wind_x", HELM_NUM(s.sea.wind_velocity.x)},
        {"wind_y", HELM_NUM(s.sea.wind_velocity.y)},
        {"wind_drag_coeff", HELM_NUM(s.sea.wind_drag_coeff)},
        {"wave_force_amp", HELM_NUM(s.sea.wave_force_amp)},
        {"wave_torque_amp", HELM_NUM(s.sea.wave_torque_amp)},
        {"visibility", HELM_NUM(s.sea.visibility)}}},
      {"camera",
       {{"width", [](Builder& b, const std::string& v) { b.cam_width = static_cast<int>(to_int(v)); }},
        {"height", [](Builder& b, const std::string& v) { b.cam_height = static_cast<int>(to_int(v)); }},
        {"fx", HELM_NUM(cam_fx)}}},
      {"sensors",
       {{"lidar_sigma", HELM_NUM(s.sensors.lidar_sigma)},
        {"sigma_u", HELM_NUM(s.sensors.state.sigma_u)},
        {"sigma_psi", HELM_NUM(s.sensors.state.sigma_psi)},
        {"sigma_r", HELM_NUM(s.sensors.state.sigma_r)}}},
      {"guidance",
       {{"standoff", HELM_NUM(s.guidance.standoff)},
        {"max_range", HELM_NUM(s.guidance.max_range)},
        {"u_max", HELM_NUM(s.guidance.u_max)},
        {"lost_frames_threshold",
         [](Builder& b, const std::string& v) {
           b.s.guidance.lost_frames_threshold = static_cast<int>(to_int(v));
         }},
        {"search_yaw_bias", HELM_NUM(s.guidance.search_yaw_bias)},
        {"holding_decay", HELM_NUM(s.guidance.holding_decay)},
        {"speed_law",
         [](Builder& b, const std::string& v) { b.s.guidance.speed_law = parse_speed_law(v); }}}},
      {"controller",
       {{"type",
         [](Builder& b, const std::string& v) { b.s.controller.type = parse_controller_type(v); }},
        {"pid_kp_u", HELM_NUM(s.controller.pid.surge.kp)},
        {"pid_ki_u", HELM_NUM(s.controller.pid.surge.ki)},
        {"pid_kd_u", HELM_NUM(s.controller.pid.surge.kd)},
        {"pid_kp_psi", HELM_NUM(s.controller.pid.yaw.kp)},
        {"pid_ki_psi", HELM_NUM(s.controller.pid.yaw.ki)},
        {"pid_kd_psi", HELM_NUM(s.controller.pid.yaw.kd)},
        {"pid_integral_limit", HELM_NUM(s.controller.pid.integral_limit)},
        {"pid_derivative_tau", HELM_NUM(s.controller.pid.derivative_filter_tau)},
        {"smc_lambda_u", HELM_NUM(s.controller.smc.lambda_u)},
        {"smc_eta_u", HELM_NUM(s.controller.smc.eta_u)},
        {"smc_lambda_psi", HELM_NUM(s.controller.smc.lambda_psi)},
        {"smc_eta_psi", HELM_NUM(s.controller.smc.eta_psi)},
        {"smc_boundary_layer", HELM_NUM(s.controller.smc.boundary_layer)},
        {"smc_filter_tau", HELM_NUM(s.controller.smc.reference_filter_tau)},
        {"smc_switching",
         [](Builder& b, const std::string& v) {
           b.s.controller.smc.switching = parse_smc_switching(v);
         }},
        {"lqr_q_u", HELM_NUM(s.controller.lqr.Q(0, 0))},
        {"lqr_q_psi", HELM_NUM(s.controller.lqr.Q(1, 1))},
        {"lqr_q_r", HELM_NUM(s.controller.lqr.Q(2, 2))},
        {"lqr_r_t1", HELM_NUM(s.controller.lqr.R(0, 0))},
        {"lqr_r_t2", HELM_NUM(s.controller.lqr.R(1, 1))}}},
      {"tracker",
       {{"kind",
         [](Builder& b, const std::string& v) {
           if (v == "emulator") {
             b.s.tracker.kind = TrackerKind::Emulator;
           } else if (v == "ncc") {
             b.s.tracker.kind = TrackerKind::Ncc;
           } else {
             throw ConfigError("expected 'emulator' or 'ncc', got '" + v + "'");
           }
         }},
        {"sigma_center_px", HELM_NUM(s.tracker.noise.sigma_center_px)},
        {"sigma_scale", HELM_NUM(s.tracker.noise.sigma_scale)},
        {"p_drop_base", HELM_NUM(s.tracker.noise.p_drop_base)},
        {"ncc_search_radius",
         [](Builder& b, const std::string& v) {
           b.s.tracker.ncc.search_radius = static_cast<int>(to_int(v));
         }},
        {"ncc_threshold", HELM_NUM(s.tracker.ncc.threshold)},
        {"ncc_margin",
         [](Builder& b, const std::string& v) {
           b.s.tracker.ncc.template_margin = static_cast<int>(to_int(v));
         }},
        {"target_extent", HELM_NUM(s.tracker.render.target_extent)},
        {"pixel_noise_sigma", HELM_NUM(s.tracker.render.pixel_noise_sigma)},
        {"dust_noise_sigma", HELM_NUM(s.tracker.render.dust_noise_sigma)}}},
      {"target",
       {{"kind",
         [](Builder& b, const std::string& v) {
           if (v == "line") {
             b.s.target.kind = TrajectoryKind::Line;
           } else if (v == "triangle") {
             b.s.target.kind = TrajectoryKind::Triangle;
           } else if (v == "stationary") {
             b.s.target.kind = TrajectoryKind::Stationary;
           } else {
             throw ConfigError("expected 'line', 'triangle' or 'stationary', got '" + v + "'");
           }
         }},
        {"x", HELM_NUM(tx)},
        {"y", HELM_NUM(ty)},
        {"heading", HELM_NUM(theading)},
        {"speed", HELM_NUM(s.target.speed)},
        {"side", HELM_NUM(tri_side)},
        {"ahead", HELM_NUM(tri_ahead)},
        {"centroid",
         [](Builder& b, const std::string& v) {
           const auto pts = to_points(v);
           if (pts.size() != 1) {
             throw ConfigError("expected a single 'x y' point");
           }
           b.tri_centroid = pts.front();
         }},
        {"vertices",
         [](Builder& b, const std::string& v) {
           b.s.target.vertices = to_points(v);
           b.explicit_vertices = true;
         }}}},
      {"cost",
       {{"q_pixel_psi", HELM_NUM(s.cost.q_pixel(0, 0))},
        {"q_pixel_y", HELM_NUM(s.cost.q_pixel(1, 1))},
        {"q_distance", HELM_NUM(s.cost.q_distance)},
        {"r_t1", HELM_NUM(s.cost.r_effort(0, 0))},
        {"r_t2", HELM_NUM(s.cost.r_effort(1, 1))}}},
  };
  return table;
}

#undef HELM_NUM

} // namespace

ConfigDocument ConfigDocument::parse(const std::string& text, const std::string& source) {
  ConfigDocument doc;
  doc.source_ = source;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::set<std::pair<std::string, std::string>> seen;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) {
      continue;
    }
    std::ostringstream where;
    where << source << ":" << line_no << ": ";
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(where.str() + "malformed section header");
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty() || !known_sections().contains(section)) {
        throw ConfigError(where.str() + "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(where.str() + "expected 'key = value'");
    }
    ConfigEntry e{section, trim(std::string_view(line).substr(0, eq)),
                  trim(std::string_view(line).substr(eq + 1)), line_no};
    if (e.key.empty()) {
      throw ConfigError(where.str() + "empty key");
    }
    if (!seen.insert({e.section, e.key}).second) {
      throw ConfigError(where.str() + "duplicate key '" + e.key + "'");
    }
    doc.entries_.push_back(std::move(e));
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open scenario file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

void ConfigDocument::set(const std::string& path, const std::string& value) {
  std::string section;
  std::string key = path;
  if (const auto dot = path.find('.'); dot != std::string::npos) {
    section = path.substr(0, dot);
    key = path.substr(dot + 1);
  }
  if (!known_sections().contains(section)) {
    throw ConfigError("unknown section in parameter path '" + path + "'");
  }
  const auto& table = setters().at(section);
  if (!table.contains(key)) {
    throw ConfigError("parameter path '" + path + "' does not resolve");
  }
  for (ConfigEntry& e : entries_) {
    if (e.section == section && e.key == key) {
      e.value = value;
      return;
    }
  }
  entries_.push_back({section, key, value, 0});
}

std::vector<Vec2> equilateral_triangle(Vec2 centroid, double side) {
  const double radius = side / std::sqrt(3.0);
  std::vector<Vec2> v;
  for (int k = 0; k < 3; ++k) {
    const double a = 0.5 * kPi + k * kTwoPi / 3.0;
    v.push_back({centroid.x + radius * std::cos(a), centroid.y + radius * std::sin(a)});
  }
  return v;
}

void TrajectorySpec::validate() const {
  if (!(speed >= 0.0)) {
    throw ConfigError("target: speed must be non-negative");
  }
  if (kind == TrajectoryKind::Triangle) {
    if (vertices.size() != 3) {
      throw ConfigError("target: a triangle needs exactly 3 vertices");
    }
    for (int k = 0; k < 3; ++k) {
      const Vec2& a = vertices[k];
      const Vec2& b = vertices[(k + 1) % 3];
      if (std::hypot(b.x - a.x, b.y - a.y) <= 0.0) {
        throw ConfigError("target: triangle has a zero-length edge");
      }
    }
  }
}

void Scenario::validate() const {
  if (!(duration > 0.0)) {
    throw ConfigError("scenario: duration must be positive");
  }
  if (!(dt > 0.0 && dt <= 0.1)) {
    throw ConfigError("scenario: dt must lie in (0, 0.1]");
  }
  if (duration / dt > 1e7) {
    throw ConfigError("scenario: duration / dt exceeds 1e7 steps");
  }
  if (frame_stride < 1) {
    throw ConfigError("scenario: frame_stride must be >= 1");
  }
  usv.validate();
  sea.validate();
  guidance.validate();
  target.validate();
  tracker.noise.validate();
  if (!(tracker.render.target_extent > 0.0)) {
    throw ConfigError("tracker: target_extent must be positive");
  }
  if (tracker.render.pixel_noise_sigma < 0.0 || tracker.render.dust_noise_sigma < 0.0) {
    throw ConfigError("tracker: render noise must be non-negative");
  }
  if (tracker.ncc.search_radius < 1 || tracker.ncc.template_margin < 0) {
    throw ConfigError("tracker: ncc_search_radius must be >= 1 and ncc_margin >= 0");
  }
  if (sensors.lidar_sigma < 0.0 || sensors.state.sigma_u < 0.0 || sensors.state.sigma_psi < 0.0 ||
      sensors.state.sigma_r < 0.0) {
    throw ConfigError("sensors: sigmas must be non-negative");
  }
  switch (controller.type) {
  case ControllerType::Pid:
    controller.pid.validate();
    break;
  case ControllerType::Smc:
    controller.smc.validate();
    break;
  case ControllerType::Lqr:
    controller.lqr.validate();
    break;
  }
  cost.validate();
}

std::size_t Scenario::record_count() const {
  return static_cast<std::size_t>(std::floor(duration / dt + 1e-9)) + 1;
}

Scenario scenario_from(const ConfigDocument& doc) {
  Builder b;
  // A preset replaces the whole sea state, so it must precede the other keys.
  for (const ConfigEntry& e : doc.entries()) {
    if (e.section == "sea" && e.key == "preset") {
      if (e.value == "calm") {
        b.s.sea = SeaState::calm();
      } else if (e.value == "rough") {
        b.s.sea = SeaState::rough();
      } else {
        entry_fail(doc.source(), e, "expected 'calm' or 'rough'");
      }
    }
  }
  const auto& table = setters();
  for (const ConfigEntry& e : doc.entries()) {
    const auto& keys = table.at(e.section);
    const auto it = keys.find(e.key);
    if (it == keys.end()) {
      entry_fail(doc.source(), e, "unknown key");
    }
    try {
      it->second(b, e.value);
    } catch (const ConfigError& err) {
      entry_fail(doc.source(), e, err.what());
    }
  }

  Scenario s = std::move(b.s);
  s.initial.pose = Pose2D(b.x0, b.y0, b.psi0);
  s.camera = CameraIntrinsics(b.cam_width, b.cam_height, b.cam_fx);
  s.target.origin = Pose2D(b.tx, b.ty, b.theading);
  if (s.target.kind == TrajectoryKind::Triangle && !b.explicit_vertices) {
    const Vec2 centroid =
        b.tri_centroid.value_or(Vec2{b.x0 + b.tri_ahead * std::cos(s.initial.pose.psi),
                                     b.y0 + b.tri_ahead * std::sin(s.initial.pose.psi)});
    s.target.vertices = equilateral_triangle(centroid, b.tri_side);
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return scenario_from(ConfigDocument::load(path));
}

} // namespace helm
