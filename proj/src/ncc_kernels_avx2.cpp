// Built with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "helm/ncc_kernels.hpp"

namespace helm::detail {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

} // namespace

void ncc_response_avx2(const Frame& frame, const NccTemplate& tmpl, PlacementGrid grid,
                       std::span<double> out) {
  const int tw = tmpl.width;
  const int th = tmpl.height;
  const int vec_end = tw & ~3;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      __m256d vp = _mm256_setzero_pd();
      __m256d vpp = _mm256_setzero_pd();
      __m256d vpt = _mm256_setzero_pd();
      double sp = 0.0, spp = 0.0, spt = 0.0;
      for (int ty = 0; ty < th; ++ty) {
        const float* prow = frame.row(grid.y0 + j + ty) + grid.x0 + i;
        const double* trow = tmpl.centered.data() + static_cast<std::size_t>(ty) * tw;
        int tx = 0;
        for (; tx < vec_end; tx += 4) {
          const __m256d p = _mm256_cvtps_pd(_mm_loadu_ps(prow + tx));
          const __m256d t = _mm256_loadu_pd(trow + tx);
          vp = _mm256_add_pd(vp, p);
          vpp = _mm256_fmadd_pd(p, p, vpp);
          vpt = _mm256_fmadd_pd(p, t, vpt);
        }
        for (; tx < tw; ++tx) {
          const double p = prow[tx];
          sp += p;
          spp += p * p;
          spt += p * trow[tx];
        }
      }
      sp += hsum(vp);
      spp += hsum(vpp);
      spt += hsum(vpt);
      out[static_cast<std::size_t>(j) * grid.nx + i] = ncc_finish(sp, spp, spt, tmpl);
    }
  }
}

} // namespace helm::detail
