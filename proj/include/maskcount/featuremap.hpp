// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

namespace maskcount {

// Patch-grid feature tensor, row major [gy][gx][d].
struct FeatureMap {
  int grid_h = 0;
  int grid_w = 0;
  int dim = 0;
  int src_height = 0;  // image the grid was computed from
  int src_width = 0;
  std::vector<float> data;

  bool valid() const {
    return grid_h > 0 && grid_w > 0 && dim > 0 &&
           data.size() == (size_t)grid_h * grid_w * dim;
  }
  std::span<const float> at(int gx, int gy) const {
    return {data.data() + ((size_t)gy * grid_w + gx) * dim, (size_t)dim};
  }
  float* cell(int gx, int gy) { return data.data() + ((size_t)gy * grid_w + gx) * dim; }
};

}  // namespace maskcount
