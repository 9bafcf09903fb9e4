#pragma once

// Shared value types and conventions.
//
// World frame is planar ENU: x east, y north, yaw psi counter-clockwise from
// the world x-axis. Pixel x grows to the right, pixel y grows downward.
// Every physical quantity is SI; pixels are the only other unit.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace helm {

// Error taxonomy. The CLI maps ConfigError to exit code 1, everything else
// to exit code 2.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class NumericalError : public Error {
public:
  using Error::Error;
};

class EvaluationError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }

/// Wraps an angle into (-pi, pi]. Throws DomainError for non-finite input.
double wrap_angle(double theta);

struct Pose2D {
  double x = 0.0;   // m, east
  double y = 0.0;   // m, north
  double psi = 0.0; // rad, wrapped to (-pi, pi]

  Pose2D() = default;
  Pose2D(double x_, double y_, double psi_) : x(x_), y(y_), psi(wrap_angle(psi_)) {}
};

struct BodyState {
  Pose2D pose;
  double u = 0.0; // surge, m/s
  double r = 0.0; // yaw rate, rad/s
};

struct BoundingBox {
  double x = 0.0; // left edge, px
  double y = 0.0; // top edge, px
  double w = 0.0;
  double h = 0.0;

  double center_x() const { return x + 0.5 * w; }
  double center_y() const { return y + 0.5 * h; }
  double area() const { return w * h; }

  static BoundingBox from_center(double cx, double cy, double w, double h) {
    return {cx - 0.5 * w, cy - 0.5 * h, w, h};
  }
};

/// Pinhole camera with the principal point at the image center.
class CameraIntrinsics {
public:
  CameraIntrinsics() : CameraIntrinsics(640, 480, 500.0) {}
  CameraIntrinsics(int width, int height, double fx);

  int width() const { return width_; }
  int height() const { return height_; }
  double fx() const { return fx_; }
  double cx() const { return 0.5 * width_; }
  double cy() const { return 0.5 * height_; }
  double hfov() const { return 2.0 * std::atan(width_ / (2.0 * fx_)); }

private:
  int width_;
  int height_;
  double fx_;
};

/// Vehicle parameters. Defaults describe a small twin-hull catamaran;
/// per-thruster limits follow from m * udot_max split over two thrusters.
struct UsvParams {
  double m = 20.0;                    // kg
  double izz = 3.2;                   // kg m^2
  double l = 0.4;                     // thruster moment arm, m
  double u_max = 1.5;                 // nominal cruise speed, m/s
  double udot_max = 10.0;             // m/s^2
  double rdot_max = deg_to_rad(50.0); // rad/s^2
  double thrust_min = -100.0;         // N per thruster
  double thrust_max = 100.0;          // N per thruster
  double u_abs_cap = 5.0;             // m/s, integrator clamp
  double r_abs_cap = 2.0;             // rad/s, integrator clamp

  /// Throws ConfigError when a parameter is out of range.
  void validate() const;
};

} // namespace helm
