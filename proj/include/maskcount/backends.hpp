// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "maskcount/bitmap.hpp"
#include "maskcount/featuremap.hpp"
#include "maskcount/geometry.hpp"
#include "maskcount/image.hpp"

namespace maskcount {

struct PointPrompt {
  int x = 0;
  int y = 0;
};
struct BoxPrompt {
  Box box;
};
using Prompt = std::variant<PointPrompt, BoxPrompt>;

enum class OriginKind { full, tile };
struct OriginScale {
  OriginKind kind = OriginKind::full;
  int row = 0;
  int col = 0;
};

// One decoded instance mask. Degenerate entries (empty decode, out-of-bounds
// prompt) keep their slot so |masks| == |prompts| holds.
struct MaskProposal {
  Bitmap bitmap;
  int64_t area = 0;
  Box bbox;
  float segmenter_confidence = 0.0f;
  OriginScale origin;
  bool degenerate = true;
  std::string note;  // reason for degenerate entries

  static MaskProposal from_bitmap(Bitmap bm, float confidence, OriginScale origin = {});
  static MaskProposal degenerate_entry(int h, int w, std::string reason);
};

struct SegmenterInfo {
  std::string name;
  std::string variant;      // base | huge | mock
  int input_resolution = 0;  // 0 = native resolution
  int prompt_batch_limit = 0;
};

struct SemanticInfo {
  std::string name;
  int grid_h = 0;  // patch grid for a conforming input
  int grid_w = 0;
  int dim = 0;
};

// Opaque per-image encoder state, reusable across prompt decodes.
class EmbeddedImage {
 public:
  virtual ~EmbeddedImage() = default;
  int height() const { return h_; }
  int width() const { return w_; }

 protected:
  EmbeddedImage(int h, int w) : h_(h), w_(w) {}
  int h_ = 0, w_ = 0;
};

// Promptable segmenter: image encoder + prompt-driven mask decoder.
// Instances are not required to be safe for concurrent calls; the mock
// adapters are. decode() returns exactly one (possibly degenerate) mask per
// prompt, the best-scoring candidate when the model proposes several.
class SegmenterBackend {
 public:
  virtual ~SegmenterBackend() = default;
  virtual SegmenterInfo info() const = 0;
  virtual std::unique_ptr<EmbeddedImage> encode(const RawImage& image) = 0;
  virtual std::vector<MaskProposal> decode(const EmbeddedImage& emb,
                                           std::span<const Prompt> prompts) = 0;
  // Patch-grid features from the segmenter's own encoder (the matching
  // fallback when no dedicated semantic encoder is configured).
  virtual FeatureMap features(const EmbeddedImage& emb) = 0;
};

// Stand-alone semantic feature extractor.
class SemanticEncoderBackend {
 public:
  virtual ~SemanticEncoderBackend() = default;
  virtual SemanticInfo info() const = 0;
  virtual FeatureMap embed(const RawImage& image) = 0;
};

}  // namespace maskcount
