#include "helm/core.hpp"

namespace helm {

double wrap_angle(double theta) {
  if (!std::isfinite(theta)) {
    throw DomainError("wrap_angle: non-finite angle");
  }
  double r = std::remainder(theta, kTwoPi); // [-pi, pi]
  if (r <= -kPi) {
    r += kTwoPi;
  }
  return r;
}

CameraIntrinsics::CameraIntrinsics(int width, int height, double fx)
    : width_(width), height_(height), fx_(fx) {
  if (width <= 0 || height <= 0) {
    throw ConfigError("camera: image size must be positive");
  }
  if (!(fx > 0.0) || !std::isfinite(fx)) {
    throw ConfigError("camera: focal length must be positive");
  }
}

void UsvParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("usv: ") + name + " must be positive");
    }
  };
  positive(m, "mass");
  positive(izz, "izz");
  positive(l, "arm");
  positive(u_max, "u_max");
  positive(udot_max, "udot_max");
  positive(rdot_max, "rdot_max");
  positive(thrust_max, "thrust_max");
  positive(u_abs_cap, "u_abs_cap");
  positive(r_abs_cap, "r_abs_cap");
  if (!std::isfinite(thrust_min) || !(thrust_min < thrust_max)) {
    throw ConfigError("usv: thrust_min must be below thrust_max");
  }
}

} // namespace helm
