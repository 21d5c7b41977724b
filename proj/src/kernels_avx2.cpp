// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0
//
// AVX2 kernel variants. Lanewise kernels mirror the scalar operation order
// exactly (mul/add only, no FMA) and are bit-identical to the reference;
// dot_f64 reduces lanes at the end and is tolerance-checked instead.

#include <immintrin.h>

#include "kernels_detail.hpp"
#include "kernels_impl.hpp"

namespace maskcount::kernels {
namespace avx2 {

using namespace detail;

static inline __m256 cbrt_pos8(__m256 x) {
  __m256i i = _mm256_castps_si256(x);
  // unsigned i/3 via magic multiply (0xAAAAAAAB), even/odd 32-bit lanes
  const __m256i magic = _mm256_set1_epi32((int)0xAAAAAAABu);
  __m256i even = _mm256_srli_epi64(_mm256_mul_epu32(i, magic), 33);
  __m256i odd = _mm256_srli_epi64(_mm256_mul_epu32(_mm256_srli_epi64(i, 32), magic), 33);
  __m256i third = _mm256_blend_epi32(even, _mm256_slli_epi64(odd, 32), 0xAA);
  __m256i seed = _mm256_add_epi32(third, _mm256_set1_epi32(0x2A514067));
  __m256 y = _mm256_castsi256_ps(seed);
  const __m256 c13 = _mm256_set1_ps(0.33333334f);
  const __m256 c2 = _mm256_set1_ps(2.0f);
  for (int k = 0; k < 4; ++k) {
    __m256 yy = _mm256_mul_ps(y, y);
    y = _mm256_mul_ps(c13, _mm256_add_ps(_mm256_mul_ps(c2, y), _mm256_div_ps(x, yy)));
  }
  return y;
}

static inline __m256 lab_f8(__m256 t) {
  __m256 big = _mm256_cmp_ps(t, _mm256_set1_ps(kLabEps), _CMP_GT_OQ);
  __m256 lin = _mm256_div_ps(
      _mm256_add_ps(_mm256_mul_ps(_mm256_set1_ps(kLabKappa), t), _mm256_set1_ps(16.0f)),
      _mm256_set1_ps(116.0f));
  __m256 cub = cbrt_pos8(t);
  return _mm256_blendv_ps(lin, cub, big);
}

void rgb8_to_lab(const uint8_t* rgb, size_t n, float* lp, float* ap, float* bp) {
  const float* lut = detail::srgb_linear_lut().data();
  size_t i = 0;
  alignas(32) int32_t ir[8], ig[8], ib[8];
  for (; i + 8 <= n; i += 8) {
    for (int k = 0; k < 8; ++k) {
      ir[k] = rgb[3 * (i + k) + 0];
      ig[k] = rgb[3 * (i + k) + 1];
      ib[k] = rgb[3 * (i + k) + 2];
    }
    __m256 r = _mm256_i32gather_ps(lut, _mm256_load_si256((const __m256i*)ir), 4);
    __m256 g = _mm256_i32gather_ps(lut, _mm256_load_si256((const __m256i*)ig), 4);
    __m256 b = _mm256_i32gather_ps(lut, _mm256_load_si256((const __m256i*)ib), 4);
    __m256 x = _mm256_add_ps(_mm256_add_ps(_mm256_mul_ps(r, _mm256_set1_ps(kXr)),
                                           _mm256_mul_ps(g, _mm256_set1_ps(kXg))),
                             _mm256_mul_ps(b, _mm256_set1_ps(kXb)));
    __m256 y = _mm256_add_ps(_mm256_add_ps(_mm256_mul_ps(r, _mm256_set1_ps(kYr)),
                                           _mm256_mul_ps(g, _mm256_set1_ps(kYg))),
                             _mm256_mul_ps(b, _mm256_set1_ps(kYb)));
    __m256 z = _mm256_add_ps(_mm256_add_ps(_mm256_mul_ps(r, _mm256_set1_ps(kZr)),
                                           _mm256_mul_ps(g, _mm256_set1_ps(kZg))),
                             _mm256_mul_ps(b, _mm256_set1_ps(kZb)));
    __m256 fx = lab_f8(x);
    __m256 fy = lab_f8(y);
    __m256 fz = lab_f8(z);
    _mm256_storeu_ps(lp + i, _mm256_sub_ps(_mm256_mul_ps(_mm256_set1_ps(116.0f), fy),
                                           _mm256_set1_ps(16.0f)));
    _mm256_storeu_ps(ap + i, _mm256_mul_ps(_mm256_set1_ps(500.0f), _mm256_sub_ps(fx, fy)));
    _mm256_storeu_ps(bp + i, _mm256_mul_ps(_mm256_set1_ps(200.0f), _mm256_sub_ps(fy, fz)));
  }
  if (i < n) scalar::rgb8_to_lab(rgb + 3 * i, n - i, lp + i, ap + i, bp + i);
}

void cluster_row_assign(const float* l, const float* a, const float* b, int x0, int n,
                        float seed_l, float seed_a, float seed_b, float seed_x, float seed_y,
                        float row_y, float spatial_w, int32_t label, float* best_dist,
                        int32_t* best_label) {
  float dy = row_y - seed_y;
  float dy2s = dy * dy;
  const __m256 sl = _mm256_set1_ps(seed_l);
  const __m256 sa = _mm256_set1_ps(seed_a);
  const __m256 sb = _mm256_set1_ps(seed_b);
  const __m256 sx = _mm256_set1_ps(seed_x);
  const __m256 dy2 = _mm256_set1_ps(dy2s);
  const __m256 sw = _mm256_set1_ps(spatial_w);
  const __m256i lbl = _mm256_set1_epi32(label);
  const __m256i iota = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 dl = _mm256_sub_ps(_mm256_loadu_ps(l + i), sl);
    __m256 da = _mm256_sub_ps(_mm256_loadu_ps(a + i), sa);
    __m256 db = _mm256_sub_ps(_mm256_loadu_ps(b + i), sb);
    __m256 dc = _mm256_add_ps(
        _mm256_add_ps(_mm256_mul_ps(dl, dl), _mm256_mul_ps(da, da)), _mm256_mul_ps(db, db));
    __m256 xs =
        _mm256_cvtepi32_ps(_mm256_add_epi32(_mm256_set1_epi32(x0 + i), iota));
    __m256 dx = _mm256_sub_ps(xs, sx);
    __m256 ds = _mm256_add_ps(_mm256_mul_ps(dx, dx), dy2);
    __m256 d = _mm256_add_ps(dc, _mm256_mul_ps(sw, ds));
    __m256 cur = _mm256_loadu_ps(best_dist + i);
    __m256 win = _mm256_cmp_ps(d, cur, _CMP_LT_OQ);
    _mm256_storeu_ps(best_dist + i, _mm256_blendv_ps(cur, d, win));
    __m256i curl = _mm256_loadu_si256((const __m256i*)(best_label + i));
    __m256i newl = _mm256_blendv_epi8(curl, lbl, _mm256_castps_si256(win));
    _mm256_storeu_si256((__m256i*)(best_label + i), newl);
  }
  if (i < n) {
    scalar::cluster_row_assign(l + i, a + i, b + i, x0 + i, n - i, seed_l, seed_a, seed_b, seed_x,
                               seed_y, row_y, spatial_w, label, best_dist + i, best_label + i);
  }
}

// Nibble-LUT popcount (Mula); sums bytes with SAD against zero.
static inline __m256i popcount256(__m256i v) {
  const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4, 0, 1, 1, 2,
                                       1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low = _mm256_set1_epi8(0x0f);
  __m256i lo = _mm256_and_si256(v, low);
  __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low);
  __m256i cnt =
      _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
  return _mm256_sad_epu8(cnt, _mm256_setzero_si256());
}

static inline uint64_t hsum_epi64(__m256i v) {
  __m128i lo = _mm256_castsi256_si128(v);
  __m128i hi = _mm256_extracti128_si256(v, 1);
  __m128i s = _mm_add_epi64(lo, hi);
  return (uint64_t)_mm_extract_epi64(s, 0) + (uint64_t)_mm_extract_epi64(s, 1);
}

uint64_t popcount_words(const uint64_t* w, size_t n) {
  __m256i acc = _mm256_setzero_si256();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_epi64(acc, popcount256(_mm256_loadu_si256((const __m256i*)(w + i))));
  }
  uint64_t c = hsum_epi64(acc);
  if (i < n) c += scalar::popcount_words(w + i, n - i);
  return c;
}

uint64_t popcount_and(const uint64_t* a, const uint64_t* b, size_t n) {
  __m256i acc = _mm256_setzero_si256();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i v = _mm256_and_si256(_mm256_loadu_si256((const __m256i*)(a + i)),
                                 _mm256_loadu_si256((const __m256i*)(b + i)));
    acc = _mm256_add_epi64(acc, popcount256(v));
  }
  uint64_t c = hsum_epi64(acc);
  if (i < n) c += scalar::popcount_and(a + i, b + i, n - i);
  return c;
}

uint64_t popcount_or(const uint64_t* a, const uint64_t* b, size_t n) {
  __m256i acc = _mm256_setzero_si256();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i v = _mm256_or_si256(_mm256_loadu_si256((const __m256i*)(a + i)),
                                _mm256_loadu_si256((const __m256i*)(b + i)));
    acc = _mm256_add_epi64(acc, popcount256(v));
  }
  uint64_t c = hsum_epi64(acc);
  if (i < n) c += scalar::popcount_or(a + i, b + i, n - i);
  return c;
}

double dot_f64(const double* a, const double* b, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3]));
  if (i < n) s += scalar::dot_f64(a + i, b + i, n - i);
  return s;
}

void axpy_f32_f64(double* acc, const float* x, double w, size_t n) {
  const __m256d wv = _mm256_set1_pd(w);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d xd = _mm256_cvtps_pd(_mm_loadu_ps(x + i));
    __m256d cur = _mm256_loadu_pd(acc + i);
    _mm256_storeu_pd(acc + i, _mm256_add_pd(cur, _mm256_mul_pd(wv, xd)));
  }
  if (i < n) scalar::axpy_f32_f64(acc + i, x + i, w, n - i);
}

}  // namespace avx2

const KernelTable& avx2_table() {
  static const KernelTable t{
      avx2::rgb8_to_lab,  avx2::cluster_row_assign, avx2::popcount_words, avx2::popcount_and,
      avx2::popcount_or,  avx2::dot_f64,            avx2::axpy_f32_f64,
  };
  return t;
}

}  // namespace maskcount::kernels
