// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "maskcount/common.hpp"
#include "maskcount/geometry.hpp"

namespace maskcount {

using Rgb = std::array<uint8_t, 3>;

// Interleaved 8-bit RGB image, row major.
struct RawImage {
  int height = 0;
  int width = 0;
  std::vector<uint8_t> rgb;  // height * width * 3

  bool valid() const {
    return height >= 1 && width >= 1 && rgb.size() == (size_t)height * width * 3;
  }

  const uint8_t* at(int x, int y) const { return rgb.data() + ((size_t)y * width + x) * 3; }
  uint8_t* at(int x, int y) { return rgb.data() + ((size_t)y * width + x) * 3; }

  Rgb pixel(int x, int y) const {
    const uint8_t* p = at(x, y);
    return {p[0], p[1], p[2]};
  }
  void set_pixel(int x, int y, Rgb c) {
    uint8_t* p = at(x, y);
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }

  static RawImage filled(int h, int w, Rgb c);
};

// Nearest-neighbor resampling with center-aligned sampling:
// src_x = floor((dst_x + 0.5) * src_w / dst_w).
RawImage resize_nearest(const RawImage& src, int out_h, int out_w);

RawImage crop(const RawImage& src, const Box& region);

// Minimal binary PPM (P6) codec; the OpenCV-backed codecs handle PNG/JPEG.
RawImage read_ppm(const std::string& path);
void write_ppm(const std::string& path, const RawImage& img);

}  // namespace maskcount
