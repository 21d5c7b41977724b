// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <set>

#include "maskcount/superpixel.hpp"
#include "maskcount/kernels.hpp"
#include "oracles.hpp"

using namespace maskcount;
using superpixel::SuperpixelParams;
using superpixel::SuperpixelResult;
using superpixel::compute_superpixels;
using superpixel::centers_as_prompts;

namespace {

// flood-fill connectivity check per label
bool labels_4_connected(const SuperpixelResult& r) {
  const int w = r.width, h = r.height;
  std::vector<char> seen((size_t)w * h, 0);
  std::set<int32_t> started;
  std::vector<int> stack;
  for (int i = 0; i < w * h; ++i) {
    if (seen[i]) continue;
    int32_t lab = r.labels[(size_t)i];
    if (started.count(lab)) return false;  // second component of this label
    started.insert(lab);
    stack.push_back(i);
    seen[i] = 1;
    while (!stack.empty()) {
      int p = stack.back();
      stack.pop_back();
      int x = p % w, y = p / w;
      const int nx[4] = {x - 1, x + 1, x, x};
      const int ny[4] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
        int q = ny[k] * w + nx[k];
        if (!seen[q] && r.labels[(size_t)q] == lab) {
          seen[q] = 1;
          stack.push_back(q);
        }
      }
    }
  }
  return true;
}

RawImage two_halves(int w, int h, Rgb left, Rgb right) {
  RawImage img = RawImage::filled(h, w, left);
  for (int y = 0; y < h; ++y) {
    for (int x = w / 2; x < w; ++x) img.set_pixel(x, y, right);
  }
  return img;
}

RawImage noisy_blobs(int w, int h, uint64_t seed) {
  Rng rng(seed);
  RawImage img = RawImage::filled(h, w, Rgb{40, 80, 120});
  for (int i = 0; i < 6; ++i) {
    int cx = rng.irange(8, w - 9), cy = rng.irange(8, h - 9), rad = rng.irange(4, 9);
    Rgb c{(uint8_t)rng.bounded(256), (uint8_t)rng.bounded(256), (uint8_t)rng.bounded(256)};
    for (int y = std::max(0, cy - rad); y <= std::min(h - 1, cy + rad); ++y) {
      for (int x = std::max(0, cx - rad); x <= std::min(w - 1, cx + rad); ++x) {
        int dx = x - cx, dy = y - cy;
        if (dx * dx + dy * dy <= rad * rad) img.set_pixel(x, y, c);
      }
    }
  }
  // per-pixel noise
  for (auto& b : img.rgb) {
    int v = b + (int)rng.bounded(9) - 4;
    b = (uint8_t)std::clamp(v, 0, 255);
  }
  return img;
}

std::vector<int64_t> cluster_sizes(const SuperpixelResult& r) {
  std::vector<int64_t> sz((size_t)r.num_clusters(), 0);
  for (int32_t lab : r.labels) ++sz[(size_t)lab];
  return sz;
}

double mean_spatial_variance(const SuperpixelResult& r) {
  int n = r.num_clusters();
  std::vector<double> sx(n, 0), sy(n, 0), sxx(n, 0), syy(n, 0);
  std::vector<int64_t> cnt(n, 0);
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) {
      int32_t lab = r.label_at(x, y);
      sx[lab] += x;
      sy[lab] += y;
      sxx[lab] += (double)x * x;
      syy[lab] += (double)y * y;
      ++cnt[lab];
    }
  }
  double acc = 0;
  for (int k = 0; k < n; ++k) {
    double inv = 1.0 / (double)cnt[k];
    acc += (sxx[k] * inv - sx[k] * inv * sx[k] * inv) +
           (syy[k] * inv - sy[k] * inv * sy[k] * inv);
  }
  return acc / n;
}

}  // namespace

TEST_CASE("uniform image: near-regular grid, centers within cells") {
  RawImage img = RawImage::filled(64, 64, Rgb{120, 130, 140});
  auto r = compute_superpixels(img, {.cluster_count = 16, .compactness = 10.0});
  REQUIRE(r.num_clusters() == 16);
  // centers near the 4x4 seed grid (cell centers at 8,24,40,56), drift <= S/2
  double S = r.grid_step;
  CHECK(S == doctest::Approx(16.0));
  std::vector<PointF> centers = r.centers;
  std::sort(centers.begin(), centers.end(), [](PointF a, PointF b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  int idx = 0;
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 4; ++i, ++idx) {
      CHECK(std::abs(centers[(size_t)idx].x - (8.0 + 16.0 * i)) <= S / 2);
      CHECK(std::abs(centers[(size_t)idx].y - (8.0 + 16.0 * j)) <= S / 2);
    }
  }
}

TEST_CASE("2x2 image with four distinct colors, K=4: singleton clusters") {
  RawImage img = RawImage::filled(2, 2, Rgb{0, 0, 0});
  img.set_pixel(0, 0, {255, 0, 0});
  img.set_pixel(1, 0, {0, 255, 0});
  img.set_pixel(0, 1, {0, 0, 255});
  img.set_pixel(1, 1, {255, 255, 0});
  auto r = compute_superpixels(img, {.cluster_count = 4});
  REQUIRE(r.num_clusters() == 4);
  std::set<int32_t> labs(r.labels.begin(), r.labels.end());
  CHECK(labs.size() == 4);
  std::vector<PointF> centers = r.centers;
  std::sort(centers.begin(), centers.end(), [](PointF a, PointF b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  CHECK(centers[0].x == doctest::Approx(0.0));
  CHECK(centers[0].y == doctest::Approx(0.0));
  CHECK(centers[3].x == doctest::Approx(1.0));
  CHECK(centers[3].y == doctest::Approx(1.0));
}

TEST_CASE("two homogeneous halves, K=2: boundary matches the 2-means oracle") {
  const int w = 32, h = 32;
  RawImage img = two_halves(w, h, Rgb{200, 40, 40}, Rgb{40, 200, 40});
  SuperpixelParams params{.cluster_count = 2, .compactness = 10.0};
  auto r = compute_superpixels(img, params);
  REQUIRE(r.num_clusters() == 2);

  // oracle: 2-means over (lab, scaled xy) with the same weighting
  const auto& K = kernels::active();
  std::vector<float> l((size_t)w * h), a((size_t)w * h), b((size_t)w * h);
  K.rgb8_to_lab(img.rgb.data(), (size_t)w * h, l.data(), a.data(), b.data());
  double S = r.grid_step;
  double pos_w = params.compactness / S;
  std::vector<std::array<double, 5>> feats((size_t)w * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      size_t i = (size_t)y * w + x;
      feats[i] = {l[i], a[i], b[i], pos_w * x, pos_w * y};
    }
  }
  auto olab = oracle::two_means_labels(feats, 99);

  // per-row boundary columns must agree within one pixel column
  for (int y = 0; y < h; ++y) {
    int slic_left = 0, oracle_left = 0;
    for (int x = 0; x < w; ++x) {
      if (r.label_at(x, y) == r.label_at(0, y)) ++slic_left;
      if (olab[(size_t)y * w + x] == olab[(size_t)y * w]) ++oracle_left;
    }
    CHECK(std::abs(slic_left - oracle_left) <= 1);
    CHECK(std::abs(slic_left - w / 2) <= 1);  // color edge is at w/2
  }
}

TEST_CASE("invariants: totality, connectivity, determinism") {
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    RawImage img = noisy_blobs(96, 80, seed);
    auto r1 = compute_superpixels(img, {.cluster_count = 60});
    auto r2 = compute_superpixels(img, {.cluster_count = 60});
    CHECK(r1.labels == r2.labels);
    REQUIRE(r1.centers.size() == r2.centers.size());
    for (size_t i = 0; i < r1.centers.size(); ++i) {
      CHECK(r1.centers[i].x == r2.centers[i].x);
      CHECK(r1.centers[i].y == r2.centers[i].y);
    }
    auto sz = cluster_sizes(r1);
    int64_t total = 0;
    for (int64_t s : sz) {
      CHECK(s > 0);
      total += s;
    }
    CHECK(total == (int64_t)96 * 80);
    CHECK(labels_4_connected(r1));
    for (const auto& c : r1.centers) {
      CHECK(c.x >= 0.0);
      CHECK(c.x <= 95.0);
      CHECK(c.y >= 0.0);
      CHECK(c.y <= 79.0);
    }
  }
}

TEST_CASE("connectivity holds even on adversarial noise") {
  // pure per-pixel noise produces a huge number of fragments to merge
  for (uint64_t seed : {100ull, 101ull}) {
    Rng rng(seed);
    RawImage img = RawImage::filled(60, 60, Rgb{0, 0, 0});
    for (auto& b : img.rgb) b = (uint8_t)rng.bounded(256);
    auto r = compute_superpixels(img, {.cluster_count = 100, .compactness = 0.5});
    CHECK(labels_4_connected(r));
    std::set<int32_t> labs(r.labels.begin(), r.labels.end());
    CHECK((int)labs.size() == r.num_clusters());
  }
}

TEST_CASE("compactness monotonicity over a fixed corpus (statistical)") {
  double var_low = 0, var_high = 0;
  for (uint64_t seed : {10ull, 11ull, 12ull, 13ull, 14ull}) {
    RawImage img = noisy_blobs(80, 80, seed);
    var_low += mean_spatial_variance(compute_superpixels(img, {.cluster_count = 49,
                                                               .compactness = 1.0}));
    var_high += mean_spatial_variance(compute_superpixels(img, {.cluster_count = 49,
                                                                .compactness = 40.0}));
  }
  CHECK(var_high <= var_low);
}

TEST_CASE("parameter validation") {
  RawImage img = RawImage::filled(8, 8, Rgb{1, 2, 3});
  CHECK_THROWS_AS((void)compute_superpixels(img, {.cluster_count = 65}), Error);
  CHECK_THROWS_AS((void)compute_superpixels(img, {.cluster_count = 0}), Error);
  CHECK_THROWS_AS((void)compute_superpixels(img, {.cluster_count = 4, .compactness = 0.0}),
                  Error);
  RawImage empty;
  CHECK_THROWS_AS((void)compute_superpixels(empty, {.cluster_count = 1}), Error);
}

TEST_CASE("centers_as_prompts: rounding and row-major order") {
  SuperpixelResult r;
  r.width = 20;
  r.height = 20;
  SUBCASE("single center rounds to nearest pixel") {
    r.centers = {{3.4, 7.9}};
    auto p = centers_as_prompts(r);
    REQUIRE(p.size() == 1);
    CHECK(p[0] == Point{3, 8});
  }
  SUBCASE("degenerate result gives empty prompt list") {
    auto p = centers_as_prompts(r);
    CHECK(p.empty());
  }
  SUBCASE("grid of centers sorts row-major") {
    // insert 4x4 grid in scrambled order
    std::vector<PointF> cs;
    for (int j = 3; j >= 0; --j) {
      for (int i = 0; i < 4; ++i) cs.push_back({(double)(i * 5 + 2), (double)(j * 5 + 2)});
    }
    r.centers = cs;
    auto p = centers_as_prompts(r);
    REQUIRE(p.size() == 16);
    // oracle: sort a copy of the rounded points row-major
    std::vector<Point> expect;
    for (const auto& c : cs) expect.push_back({(int)std::lround(c.x), (int)std::lround(c.y)});
    std::sort(expect.begin(), expect.end(), [](Point a, Point b) {
      return a.y != b.y ? a.y < b.y : a.x < b.x;
    });
    CHECK(p == expect);
  }
}
