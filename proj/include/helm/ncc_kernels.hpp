#pragma once

// Zero-normalized cross-correlation response over a grid of template
// placements. The scalar kernel is the reference; vector kernels must agree
// with it to rounding (see tests/test_ncc_kernels.cpp).

#include <span>
#include <string_view>
#include <vector>

#include "helm/frame.hpp"

namespace helm {

enum class SimdLevel { Scalar, Avx2 };

std::string_view to_string(SimdLevel level);

/// Best level supported by both the build and the running CPU. Setting
/// HELM_SIMD=scalar in the environment forces the scalar kernel.
SimdLevel detected_simd();
bool simd_available(SimdLevel level);

/// Template with its mean removed, ready for repeated matching.
struct NccTemplate {
  int width = 0;
  int height = 0;
  std::vector<double> centered; // row-major, t - mean(t)
  double energy = 0.0;          // sum of centered^2

  static NccTemplate from_frame(const Frame& patch);

  bool degenerate() const;
  int size() const { return width * height; }
};

/// Placements with top-left corner (x0 + i, y0 + j), 0 <= i < nx, 0 <= j < ny.
/// Every placement must fit inside the frame.
struct PlacementGrid {
  int x0 = 0;
  int y0 = 0;
  int nx = 0;
  int ny = 0;
};

/// Writes nx*ny scores in row-major order (j outer). A placement whose
/// patch has zero variance scores 0.
void ncc_response(const Frame& frame, const NccTemplate& tmpl, PlacementGrid grid,
                  std::span<double> out, SimdLevel level);

inline void ncc_response(const Frame& frame, const NccTemplate& tmpl, PlacementGrid grid,
                         std::span<double> out) {
  ncc_response(frame, tmpl, grid, out, detected_simd());
}

namespace detail {
void ncc_response_scalar(const Frame& frame, const NccTemplate& tmpl, PlacementGrid grid,
                         std::span<double> out);
#if defined(HELM_BUILD_AVX2)
void ncc_response_avx2(const Frame& frame, const NccTemplate& tmpl, PlacementGrid grid,
                       std::span<double> out);
#endif
double ncc_finish(double sum_p, double sum_pp, double sum_pt, const NccTemplate& tmpl);
} // namespace detail

} // namespace helm
