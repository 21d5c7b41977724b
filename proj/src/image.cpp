// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#include "maskcount/image.hpp"

#include <cstdio>
#include <fstream>

namespace maskcount {

RawImage RawImage::filled(int h, int w, Rgb c) {
  RawImage img;
  img.height = h;
  img.width = w;
  img.rgb.resize((size_t)h * w * 3);
  for (size_t i = 0; i < (size_t)h * w; ++i) {
    img.rgb[3 * i + 0] = c[0];
    img.rgb[3 * i + 1] = c[1];
    img.rgb[3 * i + 2] = c[2];
  }
  return img;
}

RawImage resize_nearest(const RawImage& src, int out_h, int out_w) {
  if (!src.valid() || out_h < 1 || out_w < 1) {
    fail(errc::invalid_parameter, "resize_nearest: bad dimensions");
  }
  RawImage dst;
  dst.height = out_h;
  dst.width = out_w;
  dst.rgb.resize((size_t)out_h * out_w * 3);
  std::vector<int> xmap((size_t)out_w);
  for (int x = 0; x < out_w; ++x) {
    int sx = (int)(((double)x + 0.5) * src.width / out_w);
    xmap[x] = sx < src.width ? sx : src.width - 1;
  }
  for (int y = 0; y < out_h; ++y) {
    int sy = (int)(((double)y + 0.5) * src.height / out_h);
    if (sy >= src.height) sy = src.height - 1;
    const uint8_t* srow = src.rgb.data() + (size_t)sy * src.width * 3;
    uint8_t* drow = dst.rgb.data() + (size_t)y * out_w * 3;
    for (int x = 0; x < out_w; ++x) {
      const uint8_t* s = srow + (size_t)xmap[x] * 3;
      drow[3 * x + 0] = s[0];
      drow[3 * x + 1] = s[1];
      drow[3 * x + 2] = s[2];
    }
  }
  return dst;
}

RawImage crop(const RawImage& src, const Box& region) {
  if (region.empty() || region.x0 < 0 || region.y0 < 0 || region.x1 > src.width ||
      region.y1 > src.height) {
    fail(errc::invalid_parameter, "crop: region outside image");
  }
  RawImage dst;
  dst.height = region.height();
  dst.width = region.width();
  dst.rgb.resize((size_t)dst.height * dst.width * 3);
  for (int y = 0; y < dst.height; ++y) {
    const uint8_t* s = src.at(region.x0, region.y0 + y);
    uint8_t* d = dst.rgb.data() + (size_t)y * dst.width * 3;
    std::copy(s, s + (size_t)dst.width * 3, d);
  }
  return dst;
}

RawImage read_ppm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(errc::io, "cannot open image: " + path);
  std::string magic;
  f >> magic;
  if (magic != "P6") fail(errc::io, "not a binary PPM: " + path);
  auto next_int = [&]() {
    // skip whitespace and '#' comments
    int c = f.get();
    while (c == '#' || std::isspace(c)) {
      if (c == '#') {
        while (c != '\n' && c != EOF) c = f.get();
      }
      c = f.get();
    }
    f.unget();
    int v = -1;
    f >> v;
    return v;
  };
  int w = next_int();
  int h = next_int();
  int maxv = next_int();
  if (w < 1 || h < 1 || maxv != 255) fail(errc::io, "unsupported PPM header: " + path);
  f.get();  // single whitespace after header
  RawImage img;
  img.width = w;
  img.height = h;
  img.rgb.resize((size_t)w * h * 3);
  f.read(reinterpret_cast<char*>(img.rgb.data()), (std::streamsize)img.rgb.size());
  if (!f) fail(errc::io, "truncated PPM: " + path);
  return img;
}

void write_ppm(const std::string& path, const RawImage& img) {
  if (!img.valid()) fail(errc::invalid_parameter, "write_ppm: invalid image");
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(errc::io, "cannot write image: " + path);
  f << "P6\n" << img.width << " " << img.height << "\n255\n";
  f.write(reinterpret_cast<const char*>(img.rgb.data()), (std::streamsize)img.rgb.size());
  if (!f) fail(errc::io, "short write: " + path);
}

}  // namespace maskcount
