#pragma once

// Scenario files: "key = value" lines, optionally grouped under [section]
// headers. Top-level keys precede the first section. '#' starts a comment.
// Unknown sections and keys are errors.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "helm/control.hpp"
#include "helm/core.hpp"
#include "helm/dynamics.hpp"
#include "helm/guidance.hpp"
#include "helm/metrics.hpp"
#include "helm/sensors.hpp"

namespace helm {

struct ConfigEntry {
  std::string section; // empty for top level
  std::string key;
  std::string value;
  int line = 0;
};

class ConfigDocument {
public:
  static ConfigDocument parse(const std::string& text, const std::string& source = "<memory>");
  static ConfigDocument load(const std::filesystem::path& path);

  const std::string& source() const { return source_; }
  const std::vector<ConfigEntry>& entries() const { return entries_; }

  /// Sets "section.key" (or a bare top-level "key"), replacing any existing
  /// value.
  void set(const std::string& path, const std::string& value);

private:
  std::string source_;
  std::vector<ConfigEntry> entries_;
};

enum class TrajectoryKind { Line, Triangle, Stationary };

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::Line;
  Pose2D origin;
  double speed = 0.0;
  std::vector<Vec2> vertices; // triangle only

  void validate() const;
};

/// Equilateral triangle with the given side, centroid and first vertex
/// pointing along +y from the centroid; vertices counter-clockwise.
std::vector<Vec2> equilateral_triangle(Vec2 centroid, double side);

enum class TrackerKind { Emulator, Ncc };

struct TrackerSpec {
  TrackerKind kind = TrackerKind::Emulator;
  EmulatorNoise noise;
  NccConfig ncc;
  RenderConfig render;
};

struct SensorSpec {
  double lidar_sigma = 0.05;
  StateNoise state{0.01, 0.002, 0.002};
};

struct Scenario {
  std::string name = "scenario";
  double duration = 30.0;
  double dt = 0.02;
  std::uint64_t seed = 1;
  int frame_stride = 1;

  UsvParams usv;
  BodyState initial;
  TrajectorySpec target;
  SeaState sea;
  CameraIntrinsics camera;
  GuidanceConfig guidance;
  TrackerSpec tracker;
  SensorSpec sensors;
  ControllerSpec controller;
  CostWeights cost;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
  /// floor(duration / dt) + 1
  std::size_t record_count() const;
};

Scenario scenario_from(const ConfigDocument& doc);
Scenario load_scenario(const std::filesystem::path& path);

} // namespace helm
