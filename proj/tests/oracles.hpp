// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementations used by the unit and acceptance
// suites. These deliberately take different computational routes from the
// library code they check (gather vs scatter pooling, direct formula
// evaluation, restart-based k-means) and must not call into it.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "maskcount/bitmap.hpp"
#include "maskcount/common.hpp"
#include "maskcount/featuremap.hpp"
#include "maskcount/image.hpp"

namespace maskcount::oracle {

// Prototype update, evaluated directly: (n*P + sum sel F) / (n + #sel).
inline std::vector<double> prototype_update_direct(const std::vector<double>& proto,
                                                   double support,
                                                   const std::vector<std::vector<double>>& feats,
                                                   const std::vector<double>& sims,
                                                   double delta) {
  size_t d = proto.size();
  std::vector<double> num(d, 0.0);
  double den = support;
  for (size_t j = 0; j < d; ++j) num[j] = support * proto[j];
  for (size_t i = 0; i < feats.size(); ++i) {
    if (sims[i] > delta) {
      den += 1.0;
      for (size_t j = 0; j < d; ++j) num[j] += feats[i][j];
    }
  }
  for (size_t j = 0; j < d; ++j) num[j] /= den;
  return num;
}

// Area-weighted masked pooling, gather formulation: walks grid cells and
// integrates mask coverage over each cell's image-space rectangle.
inline std::vector<double> pool_soft_gather(const FeatureMap& fm, const Bitmap& mask) {
  std::vector<double> feat((size_t)fm.dim, 0.0);
  const double cw = (double)mask.width() / fm.grid_w;   // cell width in pixels
  const double ch = (double)mask.height() / fm.grid_h;
  double total = 0.0;
  for (int gy = 0; gy < fm.grid_h; ++gy) {
    double ya = gy * ch, yb = (gy + 1) * ch;
    int py0 = (int)ya, py1 = std::min(mask.height() - 1, (int)std::ceil(yb) - 1);
    for (int gx = 0; gx < fm.grid_w; ++gx) {
      double xa = gx * cw, xb = (gx + 1) * cw;
      int px0 = (int)xa, px1 = std::min(mask.width() - 1, (int)std::ceil(xb) - 1);
      double w = 0.0;
      for (int y = py0; y <= py1; ++y) {
        double oy = std::min(yb, (double)y + 1.0) - std::max(ya, (double)y);
        if (oy <= 0) continue;
        for (int x = px0; x <= px1; ++x) {
          if (!mask.get(x, y)) continue;
          double ox = std::min(xb, (double)x + 1.0) - std::max(xa, (double)x);
          if (ox <= 0) continue;
          w += ox * oy;
        }
      }
      if (w > 0) {
        auto cell = fm.at(gx, gy);
        for (int d = 0; d < fm.dim; ++d) feat[(size_t)d] += w * (double)cell[(size_t)d];
        total += w;
      }
    }
  }
  if (total > 0) {
    for (double& v : feat) v /= total;
  }
  return feat;
}

// Lloyd 2-means over joint color+position features with multi-restart init;
// best by sum of squared distances. Feature scaling mirrors the clustering
// module (color raw, position scaled by m/S).
inline std::vector<int> two_means_labels(const std::vector<std::array<double, 5>>& feats,
                                         uint64_t seed, int restarts = 64) {
  const size_t n = feats.size();
  std::vector<int> best_labels(n, 0);
  double best_sse = std::numeric_limits<double>::max();
  Rng rng(seed);
  for (int r = 0; r < restarts; ++r) {
    size_t i0 = rng.bounded((uint32_t)n);
    size_t i1 = rng.bounded((uint32_t)n);
    if (i0 == i1) continue;
    std::array<double, 5> c0 = feats[i0], c1 = feats[i1];
    std::vector<int> labels(n, 0);
    double sse = 0.0;
    for (int it = 0; it < 50; ++it) {
      sse = 0.0;
      bool changed = false;
      for (size_t i = 0; i < n; ++i) {
        double d0 = 0, d1 = 0;
        for (int k = 0; k < 5; ++k) {
          d0 += (feats[i][k] - c0[k]) * (feats[i][k] - c0[k]);
          d1 += (feats[i][k] - c1[k]) * (feats[i][k] - c1[k]);
        }
        int l = d1 < d0 ? 1 : 0;
        if (l != labels[i]) changed = true;
        labels[i] = l;
        sse += l ? d1 : d0;
      }
      std::array<double, 5> s0{}, s1{};
      size_t n0 = 0, n1 = 0;
      for (size_t i = 0; i < n; ++i) {
        auto& s = labels[i] ? s1 : s0;
        for (int k = 0; k < 5; ++k) s[k] += feats[i][k];
        (labels[i] ? n1 : n0)++;
      }
      if (n0 == 0 || n1 == 0) break;
      for (int k = 0; k < 5; ++k) {
        c0[k] = s0[k] / (double)n0;
        c1[k] = s1[k] / (double)n1;
      }
      if (!changed) break;
    }
    if (sse < best_sse) {
      best_sse = sse;
      best_labels = labels;
    }
  }
  return best_labels;
}

// MAE/RMSE evaluated with a separate accumulation order (long double).
inline std::pair<double, double> metrics_direct(const std::vector<std::pair<double, double>>& p) {
  long double ae = 0.0L, se = 0.0L;
  for (auto [y, yhat] : p) {
    long double e = (long double)y - (long double)yhat;
    ae += e < 0 ? -e : e;
    se += e * e;
  }
  double mae = (double)(ae / (long double)p.size());
  double rmse = std::sqrt((double)(se / (long double)p.size()));
  return {mae, rmse};
}

}  // namespace maskcount::oracle
