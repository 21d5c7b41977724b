// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#include "maskcount/superpixel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maskcount/common.hpp"
#include "maskcount/kernels.hpp"

namespace maskcount::superpixel {

namespace {

struct Seed {
  float l, a, b;
  float x, y;
};

// Squared color gradient, summed over Lab channels (3x3 cross).
float gradient_at(const std::vector<float>& l, const std::vector<float>& a,
                  const std::vector<float>& b, int w, int h, int x, int y) {
  int xm = std::max(x - 1, 0), xp = std::min(x + 1, w - 1);
  int ym = std::max(y - 1, 0), yp = std::min(y + 1, h - 1);
  size_t ixm = (size_t)y * w + xm, ixp = (size_t)y * w + xp;
  size_t iym = (size_t)ym * w + x, iyp = (size_t)yp * w + x;
  float gx = (l[ixp] - l[ixm]) * (l[ixp] - l[ixm]) + (a[ixp] - a[ixm]) * (a[ixp] - a[ixm]) +
             (b[ixp] - b[ixm]) * (b[ixp] - b[ixm]);
  float gy = (l[iyp] - l[iym]) * (l[iyp] - l[iym]) + (a[iyp] - a[iym]) * (a[iyp] - a[iym]) +
             (b[iyp] - b[iym]) * (b[iyp] - b[iym]);
  return gx + gy;
}

// Connectivity enforcement: relabel fragments into the largest 4-adjacent
// cluster. A fragment is a non-largest connected component of its label, or
// any component smaller than min_size. Returns whether anything merged.
bool connectivity_pass(std::vector<int32_t>& labels, int w, int h, int min_size) {
  const int n = w * h;
  std::vector<int32_t> comp(n, -1);
  struct Component {
    int32_t label;
    int first;  // raster index of first pixel
    int size;
  };
  std::vector<Component> comps;
  std::vector<int> stack;
  stack.reserve(256);

  for (int i = 0; i < n; ++i) {
    if (comp[i] >= 0) continue;
    int32_t cid = (int32_t)comps.size();
    int32_t lab = labels[i];
    int size = 0;
    stack.push_back(i);
    comp[i] = cid;
    while (!stack.empty()) {
      int p = stack.back();
      stack.pop_back();
      ++size;
      int px = p % w, py = p / w;
      const int nx[4] = {px - 1, px + 1, px, px};
      const int ny[4] = {py, py, py - 1, py + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
        int q = ny[k] * w + nx[k];
        if (comp[q] < 0 && labels[q] == lab) {
          comp[q] = cid;
          stack.push_back(q);
        }
      }
    }
    comps.push_back({lab, i, size});
  }

  // largest component per label
  std::vector<int32_t> largest_of_label;
  for (const auto& c : comps) {
    if (c.label >= (int32_t)largest_of_label.size()) {
      largest_of_label.resize(c.label + 1, -1);
    }
    int32_t& best = largest_of_label[c.label];
    if (best < 0 || comps[best].size < c.size) best = (int32_t)(&c - comps.data());
  }

  std::vector<int64_t> label_size(largest_of_label.size(), 0);
  for (const auto& c : comps) label_size[c.label] += c.size;

  std::vector<char> is_fragment(comps.size(), 0);
  for (size_t ci = 0; ci < comps.size(); ++ci) {
    is_fragment[ci] =
        (int32_t)ci != largest_of_label[comps[ci].label] || comps[ci].size < min_size;
  }
  std::vector<std::vector<int>> pixels_of(comps.size());
  for (int i = 0; i < n; ++i) {
    if (is_fragment[comp[i]]) pixels_of[comp[i]].push_back(i);
  }

  // merge fragments in raster order of their first pixel
  std::vector<int32_t> order;
  for (size_t ci = 0; ci < comps.size(); ++ci) {
    if (is_fragment[ci]) order.push_back((int32_t)ci);
  }
  std::sort(order.begin(), order.end(),
            [&](int32_t x, int32_t y) { return comps[x].first < comps[y].first; });

  bool merged_any = false;
  for (int32_t ci : order) {
    const auto& px = pixels_of[ci];
    int32_t own = labels[px[0]];
    // adjacent labels of the fragment, against the evolving map
    int32_t best_lab = -1;
    int64_t best_size = -1;
    for (int p : px) {
      int x = p % w, y = p / w;
      const int nx[4] = {x - 1, x + 1, x, x};
      const int ny[4] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
        int32_t nl = labels[ny[k] * w + nx[k]];
        if (nl == own) continue;
        int64_t sz = label_size[nl];
        if (sz > best_size || (sz == best_size && nl < best_lab)) {
          best_size = sz;
          best_lab = nl;
        }
      }
    }
    if (best_lab < 0) continue;  // isolated label covering everything; keep
    for (int p : px) labels[p] = best_lab;
    label_size[best_lab] += (int64_t)px.size();
    label_size[own] -= (int64_t)px.size();
    merged_any = true;
  }
  return merged_any;
}

// Chained merges can re-split a label (a fragment absorbed into a label
// whose own fragment then moves elsewhere), so iterate to a fixpoint; the
// component count strictly drops every merging pass.
void enforce_connectivity(std::vector<int32_t>& labels, int w, int h, int min_size) {
  while (connectivity_pass(labels, w, h, min_size)) {
  }
}

}  // namespace

SuperpixelResult compute_superpixels(const RawImage& image, const SuperpixelParams& params) {
  if (!image.valid()) fail(errc::invalid_parameter, "compute_superpixels: zero-area image");
  const int w = image.width, h = image.height;
  const int64_t npix = (int64_t)w * h;
  if (params.cluster_count < 1 || (int64_t)params.cluster_count > npix) {
    fail(errc::invalid_parameter, "compute_superpixels: cluster_count must be in [1, H*W]");
  }
  if (!(params.compactness > 0.0)) {
    fail(errc::invalid_parameter, "compute_superpixels: compactness must be positive");
  }
  if (params.max_iterations < 1) {
    fail(errc::invalid_parameter, "compute_superpixels: max_iterations must be positive");
  }

  const auto& K = kernels::active();

  std::vector<float> lp(npix), ap(npix), bp(npix);
  K.rgb8_to_lab(image.rgb.data(), (size_t)npix, lp.data(), ap.data(), bp.data());

  const double S = std::sqrt((double)npix / params.cluster_count);
  // seed grid: nx*ny ~= K, seeds at cell centers
  int nx = (int)std::ceil(std::sqrt((double)params.cluster_count * w / h));
  nx = std::clamp(nx, 1, w);
  int ny = (int)std::ceil((double)params.cluster_count / nx);
  ny = std::clamp(ny, 1, h);

  std::vector<Seed> seeds;
  seeds.reserve((size_t)nx * ny);
  std::vector<char> taken((size_t)npix, 0);  // one seed per pixel
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      int sx = std::min((int)(((double)i + 0.5) * w / nx), w - 1);
      int sy = std::min((int)(((double)j + 0.5) * h / ny), h - 1);
      // perturb to the lowest-gradient unclaimed position in the 3x3 neighborhood
      int bx = sx, by = sy;
      float bg = gradient_at(lp, ap, bp, w, h, sx, sy);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          int x = sx + dx, y = sy + dy;
          if (x < 0 || x >= w || y < 0 || y >= h) continue;
          if (taken[(size_t)y * w + x]) continue;
          float g = gradient_at(lp, ap, bp, w, h, x, y);
          if (g < bg || taken[(size_t)by * w + bx]) {
            bg = g;
            bx = x;
            by = y;
          }
        }
      }
      size_t idx = (size_t)by * w + bx;
      taken[idx] = 1;
      seeds.push_back({lp[idx], ap[idx], bp[idx], (float)bx, (float)by});
    }
  }
  const int nk = (int)seeds.size();

  const float spatial_w = (float)((params.compactness / S) * (params.compactness / S));
  const int win = std::max(1, (int)std::lround(S));  // half-window: 2S x 2S total

  std::vector<float> dist(npix);
  std::vector<int32_t> labels(npix, 0);
  std::vector<double> acc_l(nk), acc_a(nk), acc_b(nk), acc_x(nk), acc_y(nk);
  std::vector<int64_t> cnt(nk);

  int iterations = 0;
  for (int it = 0; it < params.max_iterations; ++it) {
    ++iterations;
    std::fill(dist.begin(), dist.end(), std::numeric_limits<float>::max());
    for (int sidx = 0; sidx < nk; ++sidx) {
      const Seed& s = seeds[sidx];
      int x0 = std::max(0, (int)s.x - win);
      int x1 = std::min(w, (int)s.x + win + 1);
      int y0 = std::max(0, (int)s.y - win);
      int y1 = std::min(h, (int)s.y + win + 1);
      for (int y = y0; y < y1; ++y) {
        size_t off = (size_t)y * w + x0;
        K.cluster_row_assign(lp.data() + off, ap.data() + off, bp.data() + off, x0, x1 - x0, s.l,
                             s.a, s.b, s.x, s.y, (float)y, spatial_w, sidx, dist.data() + off,
                             labels.data() + off);
      }
    }

    std::fill(acc_l.begin(), acc_l.end(), 0.0);
    std::fill(acc_a.begin(), acc_a.end(), 0.0);
    std::fill(acc_b.begin(), acc_b.end(), 0.0);
    std::fill(acc_x.begin(), acc_x.end(), 0.0);
    std::fill(acc_y.begin(), acc_y.end(), 0.0);
    std::fill(cnt.begin(), cnt.end(), 0);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        size_t i = (size_t)y * w + x;
        int32_t lab = labels[i];
        acc_l[lab] += lp[i];
        acc_a[lab] += ap[i];
        acc_b[lab] += bp[i];
        acc_x[lab] += x;
        acc_y[lab] += y;
        ++cnt[lab];
      }
    }

    double movement = 0.0;
    for (int k2 = 0; k2 < nk; ++k2) {
      if (cnt[k2] == 0) continue;  // empty cluster keeps its seed
      double inv = 1.0 / (double)cnt[k2];
      float nx_ = (float)(acc_x[k2] * inv);
      float ny_ = (float)(acc_y[k2] * inv);
      movement += std::abs(nx_ - seeds[k2].x) + std::abs(ny_ - seeds[k2].y);
      seeds[k2].l = (float)(acc_l[k2] * inv);
      seeds[k2].a = (float)(acc_a[k2] * inv);
      seeds[k2].b = (float)(acc_b[k2] * inv);
      seeds[k2].x = nx_;
      seeds[k2].y = ny_;
    }
    if (movement < 1.0) break;
  }

  int min_size = std::max(1, (int)((S * S) / 4.0));
  enforce_connectivity(labels, w, h, min_size);

  // compact labels in raster-first-appearance order, then centers = means
  std::vector<int32_t> remap(nk, -1);
  int32_t next = 0;
  for (int64_t i = 0; i < npix; ++i) {
    int32_t& m = remap[labels[i]];
    if (m < 0) m = next++;
    labels[i] = m;
  }

  SuperpixelResult res;
  res.height = h;
  res.width = w;
  res.iterations_run = iterations;
  res.grid_step = S;
  res.centers.assign((size_t)next, PointF{});
  std::vector<int64_t> sz((size_t)next, 0);
  std::vector<double> cx((size_t)next, 0.0), cy((size_t)next, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int32_t lab = labels[(size_t)y * w + x];
      cx[lab] += x;
      cy[lab] += y;
      ++sz[lab];
    }
  }
  for (int32_t k2 = 0; k2 < next; ++k2) {
    res.centers[k2] = PointF{cx[k2] / sz[k2], cy[k2] / sz[k2]};
  }
  res.labels = std::move(labels);
  return res;
}

std::vector<Point> centers_as_prompts(const SuperpixelResult& result) {
  std::vector<Point> pts;
  pts.reserve(result.centers.size());
  for (const auto& c : result.centers) {
    int x = (int)std::lround(c.x);
    int y = (int)std::lround(c.y);
    x = std::clamp(x, 0, result.width - 1);
    y = std::clamp(y, 0, result.height - 1);
    pts.push_back({x, y});
  }
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  return pts;
}

}  // namespace maskcount::superpixel
