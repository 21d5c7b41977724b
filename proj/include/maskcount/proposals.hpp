// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "maskcount/backends.hpp"

namespace maskcount::proposals {

enum class RefFormat { boxes, points };

// User-provided exemplars, in original-image coordinates.
struct ReferenceSpec {
  RefFormat format = RefFormat::boxes;
  std::vector<Box> boxes;
  std::vector<Point> points;

  int count() const {
    return format == RefFormat::boxes ? (int)boxes.size() : (int)points.size();
  }
  std::vector<Prompt> prompts() const;
  void validate(int image_w, int image_h) const;
};

// Affine view of one tile: `region` of the original image, upscaled to
// up_w x up_h (the original size for the standard expansion).
struct TileTransform {
  Box region;
  int up_w = 0, up_h = 0;
  int full_w = 0, full_h = 0;

  bool identity() const {
    return region.x0 == 0 && region.y0 == 0 && region.width() == full_w &&
           region.height() == full_h && up_w == full_w && up_h == full_h;
  }
};

struct Tile {
  RawImage image;
  TileTransform transform;
  OriginScale origin;
};

struct ProposalSet {
  int width = 0;
  int height = 0;
  std::vector<MaskProposal> reference_masks;
  std::vector<MaskProposal> candidates;
  bool background_filtered = false;  // keeps filter_and_dedup idempotent
};

// Cuts the image into n_p x n_p non-overlapping tiles (edge tiles absorb
// remainder pixels) and upscales each back to the full size.
std::vector<Tile> multiscale_expand(const RawImage& image, int n_p);

// Nearest-neighbor resample of a tile-space mask back into original
// coordinates, clipped to the tile's region.
MaskProposal remap_to_original(const MaskProposal& mask, const TileTransform& t);

// Decodes the exemplar prompts. Exactly count() masks in reference order;
// failed decodes stay as flagged degenerate entries.
std::vector<MaskProposal> generate_reference_masks(SegmenterBackend& backend,
                                                   const EmbeddedImage& emb,
                                                   const ReferenceSpec& refs);

// Decodes point prompts and drops degenerate results.
std::vector<MaskProposal> generate_candidates(SegmenterBackend& backend, const EmbeddedImage& emb,
                                              std::span<const Point> prompts,
                                              OriginScale origin = {});

// Collapses bit-identical masks (dense prompt grids mostly re-decode the
// same instance), keeping the highest confidence; stable order. A pure
// speedup for the later IoU dedup, which subsumes it.
void collapse_exact_duplicates(std::vector<MaskProposal>& masks);

// 1) removes the single largest-area candidate (background heuristic, once
//    per set), 2) removes candidates overlapping any reference mask at
//    IoU >= threshold, 3) collapses pairwise duplicates keeping the higher
//    segmenter confidence.
void filter_and_dedup(ProposalSet& set, double iou_threshold);

}  // namespace maskcount::proposals
