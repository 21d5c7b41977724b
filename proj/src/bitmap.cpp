// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#include "maskcount/bitmap.hpp"

#include <cassert>

#include "maskcount/kernels.hpp"

namespace maskcount {

int64_t Bitmap::count() const {
  return (int64_t)kernels::active().popcount_words(words_.data(), words_.size());
}

int64_t Bitmap::intersection_count(const Bitmap& a, const Bitmap& b) {
  assert(same_shape(a, b));
  return (int64_t)kernels::active().popcount_and(a.words_.data(), b.words_.data(),
                                                 a.words_.size());
}

int64_t Bitmap::union_count(const Bitmap& a, const Bitmap& b) {
  assert(same_shape(a, b));
  return (int64_t)kernels::active().popcount_or(a.words_.data(), b.words_.data(),
                                                a.words_.size());
}

double Bitmap::iou(const Bitmap& a, const Bitmap& b) {
  int64_t uni = union_count(a, b);
  if (uni == 0) return 0.0;
  return (double)intersection_count(a, b) / (double)uni;
}

Box Bitmap::tight_bbox() const {
  int min_x = w_, min_y = h_, max_x = -1, max_y = -1;
  for (int y = 0; y < h_; ++y) {
    const uint64_t* r = row(y);
    bool any = false;
    for (size_t wi = 0; wi < wpr_; ++wi) {
      uint64_t v = r[wi];
      if (!v) continue;
      any = true;
      int lo = (int)(wi * 64) + __builtin_ctzll(v);
      int hi = (int)(wi * 64) + 63 - __builtin_clzll(v);
      if (lo < min_x) min_x = lo;
      if (hi > max_x) max_x = hi;
    }
    if (any) {
      if (y < min_y) min_y = y;
      max_y = y;
    }
  }
  if (max_x < 0) return Box{};
  return Box{min_x, min_y, max_x + 1, max_y + 1};
}

}  // namespace maskcount
