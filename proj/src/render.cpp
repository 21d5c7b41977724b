// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#include "maskcount/render.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace maskcount::render {

namespace {

// 5x7 digit glyphs, one bit per pixel, rows top-down.
const uint8_t kDigits[10][7] = {
    {0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e},  // 0
    {0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e},  // 1
    {0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f},  // 2
    {0x1f, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0e},  // 3
    {0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02},  // 4
    {0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e},  // 5
    {0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e},  // 6
    {0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08},  // 7
    {0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e},  // 8
    {0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c},  // 9
};

void blend_pixel(RawImage& img, int x, int y, Rgb c, double alpha) {
  if (x < 0 || x >= img.width || y < 0 || y >= img.height) return;
  uint8_t* p = img.at(x, y);
  for (int k = 0; k < 3; ++k) {
    p[k] = (uint8_t)std::clamp((int)std::lround(p[k] * (1.0 - alpha) + c[k] * alpha), 0, 255);
  }
}

void draw_box(RawImage& img, const Box& b, Rgb color, int inset) {
  int x0 = b.x0 + inset, y0 = b.y0 + inset, x1 = b.x1 - 1 - inset, y1 = b.y1 - 1 - inset;
  for (int x = x0; x <= x1; ++x) {
    blend_pixel(img, x, y0, color, 1.0);
    blend_pixel(img, x, y1, color, 1.0);
  }
  for (int y = y0; y <= y1; ++y) {
    blend_pixel(img, x0, y, color, 1.0);
    blend_pixel(img, x1, y, color, 1.0);
  }
}

}  // namespace

Rgb palette_color(size_t index) {
  // golden-angle hue walk, fixed saturation/value
  double h = std::fmod(0.61803398875 * (double)(index + 1), 1.0) * 6.0;
  double s = 0.85, v = 0.95;
  int i = (int)h;
  double f = h - i;
  double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  double r, g, b;
  switch (i % 6) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
  return Rgb{(uint8_t)(r * 255), (uint8_t)(g * 255), (uint8_t)(b * 255)};
}

void draw_number(RawImage& img, int value, int x, int y, int scale, Rgb color) {
  std::string digits = std::to_string(value);
  int cx = x;
  for (char ch : digits) {
    if (ch < '0' || ch > '9') {
      cx += 6 * scale;
      continue;
    }
    const uint8_t* glyph = kDigits[ch - '0'];
    for (int row = 0; row < 7; ++row) {
      for (int col = 0; col < 5; ++col) {
        if (!((glyph[row] >> (4 - col)) & 1)) continue;
        for (int sy = 0; sy < scale; ++sy) {
          for (int sx = 0; sx < scale; ++sx) {
            blend_pixel(img, cx + col * scale + sx, y + row * scale + sy, color, 1.0);
          }
        }
      }
    }
    cx += 6 * scale;
  }
}

RawImage overlay_count(const RawImage& image, const matching::CountResult& result) {
  RawImage out = image;
  for (size_t i = 0; i < result.selected.size(); ++i) {
    const auto& m = result.selected[i].proposal;
    Rgb c = palette_color(i);
    for (int y = m.bbox.y0; y < m.bbox.y1; ++y) {
      for (int x = m.bbox.x0; x < m.bbox.x1; ++x) {
        if (m.bitmap.get(x, y)) blend_pixel(out, x, y, c, 0.45);
      }
    }
  }
  for (const auto& r : result.references) {
    if (r.degenerate) continue;
    draw_box(out, r.bbox, Rgb{0, 0, 0}, 0);
    draw_box(out, r.bbox, Rgb{255, 255, 255}, 1);
  }
  int scale = std::max(1, std::min(image.width, image.height) / 128);
  std::string text = std::to_string(result.count);
  int tw = (int)text.size() * 6 * scale;
  int x = std::max(0, image.width - tw - 2 * scale);
  int y = std::max(0, image.height - 8 * scale);
  draw_number(out, result.count, x + 1, y + 1, scale, Rgb{0, 0, 0});
  draw_number(out, result.count, x, y, scale, Rgb{255, 255, 40});
  return out;
}

RawImage label_map_image(const superpixel::SuperpixelResult& sp) {
  RawImage out = RawImage::filled(sp.height, sp.width, Rgb{0, 0, 0});
  for (int y = 0; y < sp.height; ++y) {
    for (int x = 0; x < sp.width; ++x) {
      out.set_pixel(x, y, palette_color((size_t)sp.label_at(x, y)));
    }
  }
  return out;
}

RawImage mask_image(const Bitmap& mask) {
  RawImage out = RawImage::filled(mask.height(), mask.width(), Rgb{0, 0, 0});
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.get(x, y)) out.set_pixel(x, y, Rgb{255, 255, 255});
    }
  }
  return out;
}

}  // namespace maskcount::render
