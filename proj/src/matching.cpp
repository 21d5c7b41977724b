// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#include "maskcount/matching.hpp"

#include <algorithm>
#include <cmath>

#include "maskcount/common.hpp"
#include "maskcount/kernels.hpp"

namespace maskcount::matching {

void Thresholds::validate() const {
  if (!(theta >= -1.0 && theta <= 1.0)) {
    fail(errc::invalid_parameter, "thresholds: theta must lie in [-1, 1]");
  }
  if (!(delta >= -1.0 && delta <= 1.0)) {
    fail(errc::invalid_parameter, "thresholds: delta must lie in [-1, 1]");
  }
}

namespace {

// Soft interpolation: fractional coverage of each grid cell by the mask's
// pixel squares. Scatter formulation (per set pixel, up to four cells).
std::vector<double> soft_cell_weights(const FeatureMap& fm, const Bitmap& mask, const Box& bbox) {
  std::vector<double> w((size_t)fm.grid_h * fm.grid_w, 0.0);
  const double sx = (double)fm.grid_w / mask.width();
  const double sy = (double)fm.grid_h / mask.height();
  for (int y = bbox.y0; y < bbox.y1; ++y) {
    double gya = y * sy, gyb = (y + 1) * sy;
    int gy0 = (int)gya;
    int gy1 = std::min(fm.grid_h - 1, (int)std::ceil(gyb) - 1);
    for (int x = bbox.x0; x < bbox.x1; ++x) {
      if (!mask.get(x, y)) continue;
      double gxa = x * sx, gxb = (x + 1) * sx;
      int gx0 = (int)gxa;
      int gx1 = std::min(fm.grid_w - 1, (int)std::ceil(gxb) - 1);
      for (int gy = gy0; gy <= gy1; ++gy) {
        double oy = std::min(gyb, (double)gy + 1.0) - std::max(gya, (double)gy);
        if (oy <= 0) continue;
        for (int gx = gx0; gx <= gx1; ++gx) {
          double ox = std::min(gxb, (double)gx + 1.0) - std::max(gxa, (double)gx);
          if (ox <= 0) continue;
          w[(size_t)gy * fm.grid_w + gx] += ox * oy;
        }
      }
    }
  }
  return w;
}

std::vector<double> hard_cell_weights(const FeatureMap& fm, const Bitmap& mask) {
  std::vector<double> w((size_t)fm.grid_h * fm.grid_w, 0.0);
  for (int gy = 0; gy < fm.grid_h; ++gy) {
    int y = (int)(((int64_t)(2 * gy + 1) * mask.height()) / (2 * fm.grid_h));
    for (int gx = 0; gx < fm.grid_w; ++gx) {
      int x = (int)(((int64_t)(2 * gx + 1) * mask.width()) / (2 * fm.grid_w));
      if (mask.get(x, y)) w[(size_t)gy * fm.grid_w + gx] = 1.0;
    }
  }
  return w;
}

}  // namespace

std::vector<double> pool_mask_feature(const FeatureMap& fm, const MaskProposal& mask,
                                      MaskInterp interp) {
  if (!fm.valid()) fail(errc::invalid_parameter, "pool_mask_feature: invalid feature map");
  if (mask.bitmap.height() != fm.src_height || mask.bitmap.width() != fm.src_width) {
    fail(errc::invalid_parameter, "pool_mask_feature: mask/feature-map size mismatch");
  }
  std::vector<double> feat((size_t)fm.dim, 0.0);
  if (mask.area == 0) return feat;  // zero vector; scores -1 downstream

  std::vector<double> w = interp == MaskInterp::soft
                              ? soft_cell_weights(fm, mask.bitmap, mask.bbox)
                              : hard_cell_weights(fm, mask.bitmap);
  double total = 0.0;
  for (double v : w) total += v;

  const auto& K = kernels::active();
  if (total <= 0.0) {
    // fall back to the single cell containing the mask centroid
    double cx = 0, cy = 0;
    for (int y = mask.bbox.y0; y < mask.bbox.y1; ++y) {
      for (int x = mask.bbox.x0; x < mask.bbox.x1; ++x) {
        if (mask.bitmap.get(x, y)) {
          cx += x;
          cy += y;
        }
      }
    }
    cx /= (double)mask.area;
    cy /= (double)mask.area;
    int gx = std::clamp((int)(cx * fm.grid_w / fm.src_width), 0, fm.grid_w - 1);
    int gy = std::clamp((int)(cy * fm.grid_h / fm.src_height), 0, fm.grid_h - 1);
    K.axpy_f32_f64(feat.data(), fm.at(gx, gy).data(), 1.0, (size_t)fm.dim);
    return feat;
  }

  for (int gy = 0; gy < fm.grid_h; ++gy) {
    for (int gx = 0; gx < fm.grid_w; ++gx) {
      double cw = w[(size_t)gy * fm.grid_w + gx];
      if (cw <= 0.0) continue;
      K.axpy_f32_f64(feat.data(), fm.at(gx, gy).data(), cw, (size_t)fm.dim);
    }
  }
  double inv = 1.0 / total;
  for (double& v : feat) v *= inv;
  return feat;
}

Prototype build_prototype(const FeatureMap& fm, std::span<const MaskProposal> ref_masks,
                          MaskInterp interp) {
  Prototype proto;
  proto.vec.assign((size_t)fm.dim, 0.0);
  int used = 0;
  for (const auto& m : ref_masks) {
    if (m.degenerate) continue;
    auto f = pool_mask_feature(fm, m, interp);
    for (int d = 0; d < fm.dim; ++d) proto.vec[(size_t)d] += f[(size_t)d];
    ++used;
  }
  if (used == 0) {
    fail(errc::reference_failure, "all reference masks are degenerate; cannot build a prototype");
  }
  for (double& v : proto.vec) v /= used;
  double norm2 = kernels::active().dot_f64(proto.vec.data(), proto.vec.data(), proto.vec.size());
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
    fail(errc::reference_failure, "reference prototype is zero or non-finite");
  }
  proto.support_count = used;
  proto.update_round = 0;
  return proto;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  const auto& K = kernels::active();
  double na = K.dot_f64(a.data(), a.data(), a.size());
  double nb = K.dot_f64(b.data(), b.data(), b.size());
  if (na <= 0.0 || nb <= 0.0) return -1.0;
  double c = K.dot_f64(a.data(), b.data(), a.size()) / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

void score_proposals(const Prototype& proto, std::vector<ScoredProposal>& scored) {
  for (auto& s : scored) s.similarity = cosine(proto.vec, s.feature);
}

Prototype transductive_update(const Prototype& proto, std::span<const ScoredProposal> scored,
                              double delta) {
  Prototype next;
  next.vec.assign(proto.vec.size(), 0.0);
  int selected = 0;
  for (const auto& s : scored) {
    if (s.similarity > delta) {
      for (size_t d = 0; d < next.vec.size(); ++d) next.vec[d] += s.feature[d];
      ++selected;
    }
  }
  if (selected == 0) {
    // empty sum: the vector is unchanged exactly
    next.vec = proto.vec;
    next.support_count = proto.support_count;
    next.update_round = proto.update_round + 1;
    return next;
  }
  double denom = proto.support_count + selected;
  for (size_t d = 0; d < next.vec.size(); ++d) {
    next.vec[d] = (proto.support_count * proto.vec[d] + next.vec[d]) / denom;
  }
  next.support_count = denom;
  next.update_round = proto.update_round + 1;
  return next;
}

CountResult count(std::span<const ScoredProposal> scored, double theta, int n_ref,
                  std::vector<MaskProposal> references) {
  CountResult r;
  r.n_ref = n_ref;
  r.theta = theta;
  r.references = std::move(references);
  for (const auto& s : scored) {
    if (s.similarity > theta) r.selected.push_back(s);
  }
  r.count = n_ref + (int)r.selected.size();
  return r;
}

}  // namespace maskcount::matching
