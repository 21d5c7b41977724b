// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0
//
// Scalar reference kernels. Compiled with -ffp-contract=off so the SIMD
// variants (which use explicit mul/add) can match them bit for bit.

#include <cmath>

#include "kernels_detail.hpp"
#include "maskcount/kernels.hpp"

namespace maskcount::kernels {

namespace detail {

const std::array<float, 256>& srgb_linear_lut() {
  static const std::array<float, 256> lut = [] {
    std::array<float, 256> t{};
    for (int i = 0; i < 256; ++i) {
      double c = i / 255.0;
      t[i] = (float)(c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4));
    }
    return t;
  }();
  return lut;
}

}  // namespace detail

namespace scalar {

void rgb8_to_lab(const uint8_t* rgb, size_t n, float* lp, float* ap, float* bp) {
  const auto& lut = detail::srgb_linear_lut();
  using namespace detail;
  for (size_t i = 0; i < n; ++i) {
    float r = lut[rgb[3 * i + 0]];
    float g = lut[rgb[3 * i + 1]];
    float b = lut[rgb[3 * i + 2]];
    float x = (r * kXr + g * kXg) + b * kXb;
    float y = (r * kYr + g * kYg) + b * kYb;
    float z = (r * kZr + g * kZg) + b * kZb;
    float fx = lab_f(x);
    float fy = lab_f(y);
    float fz = lab_f(z);
    lp[i] = 116.0f * fy - 16.0f;
    ap[i] = 500.0f * (fx - fy);
    bp[i] = 200.0f * (fy - fz);
  }
}

void cluster_row_assign(const float* l, const float* a, const float* b, int x0, int n,
                        float seed_l, float seed_a, float seed_b, float seed_x, float seed_y,
                        float row_y, float spatial_w, int32_t label, float* best_dist,
                        int32_t* best_label) {
  float dy = row_y - seed_y;
  float dy2 = dy * dy;
  for (int i = 0; i < n; ++i) {
    float dl = l[i] - seed_l;
    float da = a[i] - seed_a;
    float db = b[i] - seed_b;
    float dc = (dl * dl + da * da) + db * db;
    float dx = (float)(x0 + i) - seed_x;
    float ds = dx * dx + dy2;
    float d = dc + spatial_w * ds;
    if (d < best_dist[i]) {
      best_dist[i] = d;
      best_label[i] = label;
    }
  }
}

uint64_t popcount_words(const uint64_t* w, size_t n) {
  uint64_t c = 0;
  for (size_t i = 0; i < n; ++i) c += (uint64_t)__builtin_popcountll(w[i]);
  return c;
}

uint64_t popcount_and(const uint64_t* a, const uint64_t* b, size_t n) {
  uint64_t c = 0;
  for (size_t i = 0; i < n; ++i) c += (uint64_t)__builtin_popcountll(a[i] & b[i]);
  return c;
}

uint64_t popcount_or(const uint64_t* a, const uint64_t* b, size_t n) {
  uint64_t c = 0;
  for (size_t i = 0; i < n; ++i) c += (uint64_t)__builtin_popcountll(a[i] | b[i]);
  return c;
}

double dot_f64(const double* a, const double* b, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_f32_f64(double* acc, const float* x, double w, size_t n) {
  for (size_t i = 0; i < n; ++i) acc[i] = acc[i] + w * (double)x[i];
}

}  // namespace scalar

const KernelTable& scalar_table() {
  static const KernelTable t{
      scalar::rgb8_to_lab,   scalar::cluster_row_assign, scalar::popcount_words,
      scalar::popcount_and,  scalar::popcount_or,        scalar::dot_f64,
      scalar::axpy_f32_f64,
  };
  return t;
}

}  // namespace maskcount::kernels
