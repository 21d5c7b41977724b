// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "maskcount/backends.hpp"

namespace maskcount::mock {

// Synthetic scene: colored disks/squares over a solid background. Shapes of
// different classes must use distinct exact colors; rendering is painter's
// order. Scenes double as ground truth for counting tests: the true count of
// the target class is the number of its shapes.
struct Shape {
  enum class Kind { disk, square };
  Kind kind = Kind::disk;
  std::string cls;
  int cx = 0, cy = 0;
  int size = 0;  // disk radius or square side
  Rgb color{};

  Box bbox() const;
  bool contains(int x, int y) const;
};

struct Scene {
  int width = 0;
  int height = 0;
  Rgb background_color{0, 0, 0};
  std::string target_class;
  std::vector<Shape> shapes;
  std::vector<int> refs;  // exemplar shape indices (target class)

  RawImage render() const;
  int target_count() const;
  std::vector<Box> reference_boxes() const;
  std::vector<Point> reference_points() const;

  // class palette: index 0 is the background, then classes by first
  // appearance; colors map uniquely onto class indices.
  std::vector<std::string> class_list() const;
  std::map<uint32_t, int> color_to_class() const;  // packed 0xRRGGBB -> class index

  void validate() const;

  static Scene from_json_text(const std::string& text);
  static Scene from_json_file(const std::string& path);
  std::string to_json_text() const;
};

uint32_t pack_rgb(Rgb c);

struct MockSegmenterOptions {
  // Regions below this pixel area (in the image actually fed to the
  // segmenter) decode as degenerate, mimicking tiny-object failure at native
  // scale; tiling upscales objects past the limit.
  int min_region_px = 100;
  int feature_cell_px = 2;
  double feature_jitter = 0.01;
  uint64_t seed = 0;
};

// Deterministic segmenter over exact-color connected regions of its input.
// A prompt decodes to the region containing it (box prompts: the region at
// the box center). Safe for concurrent use; encode state is immutable.
class MockSegmenter : public SegmenterBackend {
 public:
  explicit MockSegmenter(MockSegmenterOptions opts = {});

  SegmenterInfo info() const override;
  std::unique_ptr<EmbeddedImage> encode(const RawImage& image) override;
  std::vector<MaskProposal> decode(const EmbeddedImage& emb,
                                   std::span<const Prompt> prompts) override;
  FeatureMap features(const EmbeddedImage& emb) override;

 private:
  MockSegmenterOptions opts_;
};

struct MockSemanticOptions {
  int cell_px = 2;
  double jitter = 0.01;
  uint64_t seed = 0;
};

// Per-pixel one-hot of the shape class (via the scene palette), mean-pooled
// to the patch grid, plus small deterministic jitter. Gives controllable
// similarity structure: same-class regions score near 1, other classes near
// 0 regardless of color.
class MockSemanticEncoder : public SemanticEncoderBackend {
 public:
  MockSemanticEncoder(const Scene& scene, MockSemanticOptions opts = {});
  MockSemanticEncoder(std::map<uint32_t, int> color_to_class, int num_classes,
                      MockSemanticOptions opts = {});

  SemanticInfo info() const override;
  FeatureMap embed(const RawImage& image) override;

 private:
  std::map<uint32_t, int> color_to_class_;
  int num_classes_ = 0;
  MockSemanticOptions opts_;
};

}  // namespace maskcount::mock
