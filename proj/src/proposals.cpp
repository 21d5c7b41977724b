// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#include "maskcount/proposals.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "maskcount/common.hpp"

namespace maskcount::proposals {

std::vector<Prompt> ReferenceSpec::prompts() const {
  std::vector<Prompt> out;
  if (format == RefFormat::boxes) {
    for (const Box& b : boxes) out.emplace_back(BoxPrompt{b});
  } else {
    for (const Point& p : points) out.emplace_back(PointPrompt{p.x, p.y});
  }
  return out;
}

void ReferenceSpec::validate(int image_w, int image_h) const {
  if (count() < 1) fail(errc::invalid_parameter, "references: at least one exemplar required");
  if (format == RefFormat::boxes) {
    for (const Box& b : boxes) {
      if (b.empty() || b.x0 < 0 || b.y0 < 0 || b.x1 > image_w || b.y1 > image_h) {
        fail(errc::invalid_parameter, "references: box outside image bounds");
      }
    }
  } else {
    for (const Point& p : points) {
      if (p.x < 0 || p.x >= image_w || p.y < 0 || p.y >= image_h) {
        fail(errc::invalid_parameter, "references: point outside image bounds");
      }
    }
  }
}

std::vector<Tile> multiscale_expand(const RawImage& image, int n_p) {
  if (!image.valid()) fail(errc::invalid_parameter, "multiscale_expand: invalid image");
  if (n_p < 1) fail(errc::invalid_parameter, "multiscale_expand: n_p must be >= 1");
  if (n_p > std::min(image.width, image.height)) {
    fail(errc::invalid_parameter, "multiscale_expand: n_p exceeds image dimensions");
  }
  std::vector<Tile> tiles;
  tiles.reserve((size_t)n_p * n_p);
  for (int r = 0; r < n_p; ++r) {
    int y0 = (int)((int64_t)r * image.height / n_p);
    int y1 = (int)((int64_t)(r + 1) * image.height / n_p);
    for (int c = 0; c < n_p; ++c) {
      int x0 = (int)((int64_t)c * image.width / n_p);
      int x1 = (int)((int64_t)(c + 1) * image.width / n_p);
      Tile t;
      t.transform = TileTransform{Box{x0, y0, x1, y1}, image.width, image.height, image.width,
                                  image.height};
      t.origin = n_p == 1 ? OriginScale{OriginKind::full, 0, 0}
                          : OriginScale{OriginKind::tile, r, c};
      if (t.transform.identity()) {
        t.image = image;
      } else {
        t.image = resize_nearest(crop(image, t.transform.region), image.height, image.width);
      }
      tiles.push_back(std::move(t));
    }
  }
  return tiles;
}

MaskProposal remap_to_original(const MaskProposal& mask, const TileTransform& t) {
  Bitmap out(t.full_h, t.full_w);
  if (!mask.degenerate) {
    const Box& r = t.region;
    const int tw = r.width(), th = r.height();
    for (int y = r.y0; y < r.y1; ++y) {
      int sy = (int)(((int64_t)(2 * (y - r.y0) + 1) * t.up_h) / (2 * th));
      if (sy >= t.up_h) sy = t.up_h - 1;
      for (int x = r.x0; x < r.x1; ++x) {
        int sx = (int)(((int64_t)(2 * (x - r.x0) + 1) * t.up_w) / (2 * tw));
        if (sx >= t.up_w) sx = t.up_w - 1;
        if (mask.bitmap.get(sx, sy)) out.set(x, y);
      }
    }
  }
  MaskProposal remapped = MaskProposal::from_bitmap(std::move(out), mask.segmenter_confidence,
                                                    mask.origin);
  if (mask.degenerate) {
    remapped.degenerate = true;
    remapped.note = mask.note;
  }
  return remapped;
}

std::vector<MaskProposal> generate_reference_masks(SegmenterBackend& backend,
                                                   const EmbeddedImage& emb,
                                                   const ReferenceSpec& refs) {
  refs.validate(emb.width(), emb.height());
  auto prompts = refs.prompts();
  auto masks = backend.decode(emb, prompts);
  if ((int)masks.size() != refs.count()) {
    fail(errc::generic, "segmenter violated the one-mask-per-prompt contract");
  }
  return masks;
}

std::vector<MaskProposal> generate_candidates(SegmenterBackend& backend, const EmbeddedImage& emb,
                                              std::span<const Point> prompts,
                                              OriginScale origin) {
  std::vector<Prompt> ps;
  ps.reserve(prompts.size());
  for (const Point& p : prompts) ps.emplace_back(PointPrompt{p.x, p.y});
  auto masks = backend.decode(emb, ps);
  std::vector<MaskProposal> out;
  out.reserve(masks.size());
  for (auto& m : masks) {
    if (m.degenerate) continue;
    m.origin = origin;
    out.push_back(std::move(m));
  }
  return out;
}

void collapse_exact_duplicates(std::vector<MaskProposal>& masks) {
  std::unordered_map<uint64_t, std::vector<size_t>> buckets;
  buckets.reserve(masks.size());
  auto hash_of = [](const MaskProposal& m) {
    uint64_t h = splitmix64((uint64_t)m.area);
    const uint64_t* w = m.bitmap.words();
    for (size_t i = 0; i < m.bitmap.word_count(); ++i) h = splitmix64(h ^ w[i]);
    return h;
  };
  std::vector<char> drop(masks.size(), 0);
  for (size_t i = 0; i < masks.size(); ++i) {
    uint64_t h = hash_of(masks[i]);
    auto& bucket = buckets[h];
    bool merged = false;
    for (size_t j : bucket) {
      if (masks[j].bitmap == masks[i].bitmap) {
        if (masks[i].segmenter_confidence > masks[j].segmenter_confidence) {
          masks[j].segmenter_confidence = masks[i].segmenter_confidence;
        }
        drop[i] = 1;
        merged = true;
        break;
      }
    }
    if (!merged) bucket.push_back(i);
  }
  size_t out = 0;
  for (size_t i = 0; i < masks.size(); ++i) {
    if (!drop[i]) {
      if (out != i) masks[out] = std::move(masks[i]);
      ++out;
    }
  }
  masks.resize(out);
}

namespace {

// mask IoU <= bbox-intersection / max(area); cheap reject before popcounts
double iou_upper_bound(const MaskProposal& a, const MaskProposal& b) {
  int64_t inter = Box::intersect(a.bbox, b.bbox).area();
  int64_t m = std::max(a.area, b.area);
  return m > 0 ? (double)inter / (double)m : 0.0;
}

double mask_iou(const MaskProposal& a, const MaskProposal& b) {
  return Bitmap::iou(a.bitmap, b.bitmap);
}

}  // namespace

void filter_and_dedup(ProposalSet& set, double iou_threshold) {
  auto& cand = set.candidates;

  // 1) background heuristic: drop the single largest-area candidate
  if (!set.background_filtered && !cand.empty()) {
    size_t big = 0;
    for (size_t i = 1; i < cand.size(); ++i) {
      if (cand[i].area > cand[big].area) big = i;
    }
    cand.erase(cand.begin() + (ptrdiff_t)big);
    set.background_filtered = true;
  }

  // 2) exclude anything duplicating a reference mask
  std::erase_if(cand, [&](const MaskProposal& c) {
    for (const auto& r : set.reference_masks) {
      if (r.degenerate) continue;
      if (iou_upper_bound(c, r) >= iou_threshold && mask_iou(c, r) >= iou_threshold) return true;
    }
    return false;
  });

  // 3) pairwise dedup, higher confidence wins; output keeps candidate order
  std::vector<size_t> order(cand.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (cand[a].segmenter_confidence != cand[b].segmenter_confidence) {
      return cand[a].segmenter_confidence > cand[b].segmenter_confidence;
    }
    if (cand[a].area != cand[b].area) return cand[a].area > cand[b].area;
    return a < b;
  });
  std::vector<size_t> kept;
  for (size_t idx : order) {
    bool dup = false;
    for (size_t k : kept) {
      if (iou_upper_bound(cand[idx], cand[k]) >= iou_threshold &&
          mask_iou(cand[idx], cand[k]) >= iou_threshold) {
        dup = true;
        break;
      }
    }
    if (!dup) kept.push_back(idx);
  }
  std::sort(kept.begin(), kept.end());
  std::vector<MaskProposal> next;
  next.reserve(kept.size());
  for (size_t k : kept) next.push_back(std::move(cand[k]));
  cand = std::move(next);
}

}  // namespace maskcount::proposals
