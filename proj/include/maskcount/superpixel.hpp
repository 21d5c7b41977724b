// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "maskcount/geometry.hpp"
#include "maskcount/image.hpp"

namespace maskcount::superpixel {

struct SuperpixelParams {
  int cluster_count = 1024;   // requested K; actual count may differ slightly
  double compactness = 10.0;  // color-vs-space weighting m
  int max_iterations = 10;
  uint64_t seed = 0;  // reserved for randomized tie-breaking; clustering itself is deterministic
};

struct SuperpixelResult {
  int height = 0;
  int width = 0;
  std::vector<int32_t> labels;  // height*width, values in [0, num_clusters)
  std::vector<PointF> centers;  // sub-pixel (x, y), one per cluster
  int iterations_run = 0;
  double grid_step = 0.0;  // seed spacing S = sqrt(H*W/K)

  int num_clusters() const { return (int)centers.size(); }
  int32_t label_at(int x, int y) const { return labels[(size_t)y * width + x]; }
};

// Localized k-means over joint CIELAB+position features: seeds on a regular
// grid of step S = sqrt(H*W/K), perturbed to the lowest-gradient spot in a
// 3x3 neighborhood, assignment restricted to a 2Sx2S window per center with
// distance d = d_lab^2 + (m/S)^2 * d_xy^2, centers updated to cluster means,
// early stop when aggregate center movement drops below one pixel. A final
// pass re-labels fragments (disconnected parts of a cluster, or anything
// smaller than S^2/4) into the largest 4-adjacent cluster.
SuperpixelResult compute_superpixels(const RawImage& image, const SuperpixelParams& params);

// Cluster centers rounded to valid pixel coordinates, row-major order.
std::vector<Point> centers_as_prompts(const SuperpixelResult& result);

}  // namespace maskcount::superpixel
