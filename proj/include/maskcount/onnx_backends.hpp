// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <memory>
#include <string>

#include "maskcount/backends.hpp"

namespace maskcount::onnx {

// Promptable segmenter over exported ONNX graphs (encoder.onnx +
// decoder.onnx inside weights_dir), run through the OpenCV DNN runtime.
// The decoder follows the standard export signature: image_embeddings,
// point_coords, point_labels, mask_input, has_mask_input, orig_im_size ->
// masks, iou_predictions. Weight files are external inputs and never ship
// with the repository.
struct SamSegmenterConfig {
  std::string variant = "vit_h";  // vit_b | vit_h (capability metadata)
  std::string weights_dir;
  int input_resolution = 1024;  // longest side fed to the encoder
  float mask_threshold = 0.0f;  // logits above this are foreground
};

class OnnxSamSegmenter : public SegmenterBackend {
 public:
  explicit OnnxSamSegmenter(const SamSegmenterConfig& cfg);
  ~OnnxSamSegmenter() override;

  SegmenterInfo info() const override;
  std::unique_ptr<EmbeddedImage> encode(const RawImage& image) override;
  std::vector<MaskProposal> decode(const EmbeddedImage& emb,
                                   std::span<const Prompt> prompts) override;
  FeatureMap features(const EmbeddedImage& emb) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Patch-token feature extractor over a single exported ViT graph. The
// output is either [1, tokens, dim] (leading non-patch tokens dropped) or
// [1, dim, g, g].
struct VitSemanticConfig {
  std::string model = "dinov2";  // clip | dino | dinov2 (sets the preset)
  std::string weights_path;
  int input_size = 0;   // 0 = preset
  int patch_size = 0;   // 0 = preset
  int drop_tokens = -1;  // -1 = preset (one class token)
  std::array<float, 3> mean{0.485f, 0.456f, 0.406f};
  std::array<float, 3> stddev{0.229f, 0.224f, 0.225f};
};

// Presets matching the published patch grids: clip 16x16, dino 28x28,
// dinov2 37x37.
VitSemanticConfig vit_semantic_preset(const std::string& model);

class OnnxVitSemantic : public SemanticEncoderBackend {
 public:
  explicit OnnxVitSemantic(const VitSemanticConfig& cfg);
  ~OnnxVitSemantic() override;

  SemanticInfo info() const override;
  FeatureMap embed(const RawImage& image) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace maskcount::onnx
