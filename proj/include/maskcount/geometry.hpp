// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>

namespace maskcount {

struct Point {
  int x = 0;
  int y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct PointF {
  double x = 0.0;
  double y = 0.0;
};

// Half-open pixel box [x0, x1) x [y0, y1).
struct Box {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  int64_t area() const { return empty() ? 0 : (int64_t)width() * height(); }
  bool empty() const { return x1 <= x0 || y1 <= y0; }

  bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }

  Point center() const { return {x0 + width() / 2, y0 + height() / 2}; }

  static Box intersect(const Box& a, const Box& b) {
    Box r{std::max(a.x0, b.x0), std::max(a.y0, b.y0), std::min(a.x1, b.x1), std::min(a.y1, b.y1)};
    if (r.empty()) return Box{};
    return r;
  }

  static double iou(const Box& a, const Box& b) {
    int64_t inter = intersect(a, b).area();
    int64_t uni = a.area() + b.area() - inter;
    return uni > 0 ? (double)inter / (double)uni : 0.0;
  }

  friend bool operator==(const Box&, const Box&) = default;
};

}  // namespace maskcount
