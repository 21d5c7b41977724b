// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "maskcount/geometry.hpp"

namespace maskcount {

// Packed binary mask. Rows are padded to 64-bit words; padding bits are kept
// zero so word-level popcounts are valid without masking.
class Bitmap {
 public:
  Bitmap() = default;
  Bitmap(int height, int width)
      : h_(height), w_(width), wpr_((width + 63) / 64), words_((size_t)h_ * wpr_, 0) {}

  int height() const { return h_; }
  int width() const { return w_; }
  bool empty_dims() const { return h_ == 0 || w_ == 0; }

  bool get(int x, int y) const {
    return (words_[(size_t)y * wpr_ + (size_t)x / 64] >> (x & 63)) & 1u;
  }
  void set(int x, int y) { words_[(size_t)y * wpr_ + (size_t)x / 64] |= 1ull << (x & 63); }
  void clear(int x, int y) { words_[(size_t)y * wpr_ + (size_t)x / 64] &= ~(1ull << (x & 63)); }

  const uint64_t* words() const { return words_.data(); }
  size_t word_count() const { return words_.size(); }
  size_t words_per_row() const { return wpr_; }
  const uint64_t* row(int y) const { return words_.data() + (size_t)y * wpr_; }
  uint64_t* row(int y) { return words_.data() + (size_t)y * wpr_; }

  int64_t count() const;
  Box tight_bbox() const;

  static bool same_shape(const Bitmap& a, const Bitmap& b) {
    return a.h_ == b.h_ && a.w_ == b.w_;
  }
  static int64_t intersection_count(const Bitmap& a, const Bitmap& b);
  static int64_t union_count(const Bitmap& a, const Bitmap& b);
  static double iou(const Bitmap& a, const Bitmap& b);

  friend bool operator==(const Bitmap&, const Bitmap&) = default;

 private:
  int h_ = 0;
  int w_ = 0;
  size_t wpr_ = 0;
  std::vector<uint64_t> words_;
};

}  // namespace maskcount
