#include "helm/ncc_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "helm/core.hpp"

namespace helm {

namespace {
// Patches with less per-pixel variance than this are treated as flat.
constexpr double kFlatVariance = 1e-9;
} // namespace

std::string_view to_string(SimdLevel level) {
  switch (level) {
  case SimdLevel::Scalar:
    return "scalar";
  case SimdLevel::Avx2:
    return "avx2";
  }
  return "unknown";
}

bool simd_available(SimdLevel level) {
  switch (level) {
  case SimdLevel::Scalar:
    return true;
  case SimdLevel::Avx2:
#if defined(HELM_BUILD_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
  }
  return false;
}

SimdLevel detected_simd() {
  static const SimdLevel level = [] {
    if (const char* env = std::getenv("HELM_SIMD"); env && std::string(env) == "scalar") {
      return SimdLevel::Scalar;
    }
    return simd_available(SimdLevel::Avx2) ? SimdLevel::Avx2 : SimdLevel::Scalar;
  }();
  return level;
}

Frame Frame::crop(int x, int y, int w, int h) const {
  if (x < 0 || y < 0 || w <= 0 || h <= 0 || x + w > width_ || y + h > height_) {
    throw DomainError("Frame::crop: rectangle outside the frame");
  }
  Frame out(w, h);
  for (int j = 0; j < h; ++j) {
    std::copy_n(row(y + j) + x, w, out.row(j));
  }
  return out;
}

NccTemplate NccTemplate::from_frame(const Frame& patch) {
  NccTemplate t;
  t.width = patch.width();
  t.height = patch.height();
  const auto px = patch.pixels();
  double mean = 0.0;
  for (float v : px) {
    mean += v;
  }
  mean /= static_cast<double>(px.size());
  t.centered.reserve(px.size());
  for (float v : px) {
    const double c = static_cast<double>(v) - mean;
    t.centered.push_back(c);
    t.energy += c * c;
  }
  return t;
}

bool NccTemplate::degenerate() const {
  return size() == 0 || !(energy > kFlatVariance * size());
}

namespace detail {

double ncc_finish(double sum_p, double sum_pp, double sum_pt, const NccTemplate& tmpl) {
  const double n = static_cast<double>(tmpl.size());
  const double var_p = sum_pp - sum_p * sum_p / n;
  if (!(var_p > kFlatVariance * n) || tmpl.degenerate()) {
    return 0.0;
  }
  // The template is zero-mean, so sum_pt already equals the centered product.
  return std::clamp(sum_pt / std::sqrt(var_p * tmpl.energy), -1.0, 1.0);
}

void ncc_response_scalar(const Frame& frame, const NccTemplate& tmpl, PlacementGrid grid,
                         std::span<double> out) {
  const int tw = tmpl.width;
  const int th = tmpl.height;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      double sp = 0.0, spp = 0.0, spt = 0.0;
      for (int ty = 0; ty < th; ++ty) {
        const float* prow = frame.row(grid.y0 + j + ty) + grid.x0 + i;
        const double* trow = tmpl.centered.data() + static_cast<std::size_t>(ty) * tw;
        for (int tx = 0; tx < tw; ++tx) {
          const double p = prow[tx];
          sp += p;
          spp += p * p;
          spt += p * trow[tx];
        }
      }
      out[static_cast<std::size_t>(j) * grid.nx + i] = ncc_finish(sp, spp, spt, tmpl);
    }
  }
}

} // namespace detail

void ncc_response(const Frame& frame, const NccTemplate& tmpl, PlacementGrid grid,
                  std::span<double> out, SimdLevel level) {
  if (grid.nx < 0 || grid.ny < 0 ||
      out.size() < static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny)) {
    throw DomainError("ncc_response: output span too small");
  }
  if (grid.nx == 0 || grid.ny == 0) {
    return;
  }
  if (grid.x0 < 0 || grid.y0 < 0 || grid.x0 + grid.nx - 1 + tmpl.width > frame.width() ||
      grid.y0 + grid.ny - 1 + tmpl.height > frame.height()) {
    throw DomainError("ncc_response: placement grid leaves the frame");
  }
  if (!simd_available(level)) {
    level = SimdLevel::Scalar;
  }
  switch (level) {
#if defined(HELM_BUILD_AVX2)
  case SimdLevel::Avx2:
    detail::ncc_response_avx2(frame, tmpl, grid, out);
    return;
#endif
  default:
    detail::ncc_response_scalar(frame, tmpl, grid, out);
    return;
  }
}

} // namespace helm
