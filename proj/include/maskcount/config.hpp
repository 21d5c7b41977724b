// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace maskcount {

// Effective run configuration. Precedence: flag overrides > config file >
// built-in defaults; unknown keys in either are rejected.
struct RunConfig {
  struct Superpixel {
    int k = 1024;
    double compactness = 10.0;
    int max_iterations = 10;
  } superpixel;

  struct Prompts {
    std::string mode = "superpixel";  // superpixel | grid
    int grid_side = 32;
  } prompts;

  struct Multiscale {
    bool enabled = true;
    int n_p = 2;
  } multiscale;

  struct Dedup {
    double iou_threshold = 0.8;
  } dedup;

  struct Matching {
    double theta = 0.4;
    double delta = 0.5;
    int tpu_rounds = 1;
    std::string mask_interp = "soft";  // soft | hard
  } matching;

  struct Segmenter {
    std::string variant = "mock";  // vit_b | vit_h | mock
    std::string weights_path;      // directory holding encoder.onnx + decoder.onnx
  } segmenter;

  struct Semantic {
    std::string model = "mock";  // clip | dino | dinov2 | mock | segmenter
    std::string weights_path;    // single onnx graph
    int input_size = 0;          // 0 = model preset
    int drop_tokens = -1;        // leading non-patch tokens; -1 = model preset
  } semantic;

  struct Mock {
    int min_region_px = 100;
    int cell_px = 2;
    double jitter = 0.01;
  } mock;

  struct Eval {
    int workers = 1;
    bool resume = false;
    int carpk_exemplars = 12;
    std::string ref_format = "boxes";  // boxes | points
  } eval;

  struct Kernels {
    std::string isa = "auto";  // auto | scalar | avx2
  } kernels;

  uint64_t seed = 0;

  void validate() const;

  std::string to_json_text() const;  // stable field order
  static RunConfig from_json_text(const std::string& text);

  // file may be empty (defaults only); overrides are "dotted.key=value"
  static RunConfig load(const std::string& config_path,
                        const std::vector<std::string>& overrides);
  void apply_override(const std::string& assignment);
};

}  // namespace maskcount
