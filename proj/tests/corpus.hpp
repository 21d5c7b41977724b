// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0
//
// Seeded synthetic scene corpora shared by the integration and acceptance
// suites. Scenes keep shapes clear of image borders and of the 2x2 tile
// seams so tiled decoding never splits an object across views.

#pragma once

#include <filesystem>
#include <fstream>
#include <vector>

#include "maskcount/common.hpp"
#include "maskcount/mock_backend.hpp"
#include "maskcount/pipeline.hpp"
#include "maskcount/sweep.hpp"

namespace maskcount::testing {

struct CorpusParams {
  int scenes = 50;
  int width = 256;
  int height = 256;
  int min_targets = 5;
  int max_targets = 60;
  int min_distractors = 0;
  int max_distractors = 8;
  // When set, roughly half the non-exemplar targets shrink below the mock
  // segmenter's native-scale size limit, so only tiled decoding can recover
  // them; distractors get a color close to the targets'.
  bool tiny_objects = false;
  uint64_t seed = 1234;
};

inline const Rgb kBackgroundColor{18, 26, 34};
inline const Rgb kTargetColor{204, 64, 56};
inline const Rgb kDistractorColorFar{64, 160, 208};   // clearly different color
inline const Rgb kDistractorColorNear{196, 68, 60};   // near-target color

inline mock::Scene make_scene(const CorpusParams& p, uint64_t scene_seed) {
  Rng rng(scene_seed);
  mock::Scene sc;
  sc.width = p.width;
  sc.height = p.height;
  sc.background_color = kBackgroundColor;
  sc.target_class = "alpha";

  const int margin = 4;
  const int seam_pad = 3;
  const int seam_x = p.width / 2, seam_y = p.height / 2;

  std::vector<Box> taken;
  auto clear_of_seams = [&](const Box& b) {
    if (b.x0 < seam_x + seam_pad && b.x1 > seam_x - seam_pad) return false;
    if (b.y0 < seam_y + seam_pad && b.y1 > seam_y - seam_pad) return false;
    return true;
  };
  auto try_place = [&](int size_min, int size_max, bool square_ok,
                       mock::Shape* out) -> bool {
    for (int attempt = 0; attempt < 600; ++attempt) {
      mock::Shape s;
      bool square = square_ok && rng.bounded(2) == 1;
      s.kind = square ? mock::Shape::Kind::square : mock::Shape::Kind::disk;
      int sz = rng.irange(size_min, size_max);
      s.size = square ? 2 * sz + 1 : sz;  // similar extents for both kinds
      int ext = square ? s.size / 2 + 1 : s.size + 1;
      s.cx = rng.irange(margin + ext, p.width - 1 - margin - ext);
      s.cy = rng.irange(margin + ext, p.height - 1 - margin - ext);
      Box bb = s.bbox();
      Box dilated{bb.x0 - 3, bb.y0 - 3, bb.x1 + 3, bb.y1 + 3};
      if (!clear_of_seams(dilated)) continue;
      bool overlap = false;
      for (const Box& t : taken) {
        if (!Box::intersect(dilated, t).empty()) {
          overlap = true;
          break;
        }
      }
      if (overlap) continue;
      taken.push_back(dilated);
      *out = s;
      return true;
    }
    return false;
  };

  int want_targets = rng.irange(p.min_targets, p.max_targets);
  int want_distractors = rng.irange(p.min_distractors, p.max_distractors);
  // dense scenes need smaller shapes to fit
  int big_max = want_targets > 30 ? 8 : 12;

  // exemplars first: comfortably above the native-scale size limit
  for (int i = 0; i < 3 && i < want_targets; ++i) {
    mock::Shape s;
    if (!try_place(8, big_max, true, &s)) break;
    s.cls = "alpha";
    s.color = kTargetColor;
    sc.shapes.push_back(s);
    sc.refs.push_back((int)sc.shapes.size() - 1);
  }
  int placed = (int)sc.shapes.size();
  for (int i = placed; i < want_targets; ++i) {
    mock::Shape s;
    bool tiny = p.tiny_objects && rng.bounded(2) == 1;
    bool ok = tiny ? try_place(3, 4, false, &s) : try_place(6, big_max, true, &s);
    if (!ok) break;
    s.cls = "alpha";
    s.color = kTargetColor;
    sc.shapes.push_back(s);
  }
  for (int i = 0; i < want_distractors; ++i) {
    mock::Shape s;
    if (!try_place(6, 9, true, &s)) break;
    s.cls = "beta";
    s.color = p.tiny_objects ? kDistractorColorNear : kDistractorColorFar;
    sc.shapes.push_back(s);
  }
  sc.validate();
  return sc;
}

inline std::vector<mock::Scene> make_corpus(const CorpusParams& p) {
  std::vector<mock::Scene> scenes;
  scenes.reserve((size_t)p.scenes);
  for (int i = 0; i < p.scenes; ++i) {
    scenes.push_back(make_scene(p, splitmix64(p.seed + (uint64_t)i)));
  }
  return scenes;
}

inline void write_corpus(const std::string& dir, const std::vector<mock::Scene>& scenes) {
  std::filesystem::create_directories(dir);
  for (size_t i = 0; i < scenes.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%03zu.json", i);
    std::ofstream f(dir + "/" + name);
    f << scenes[i].to_json_text() << "\n";
  }
}

// Full-pipeline counter over scene files; mirrors what the CLI does for the
// synthetic dataset.
class ScenePipelineCounter : public eval::SampleCounter {
 public:
  explicit ScenePipelineCounter(const RunConfig& cfg) : cfg_(cfg) {}

  double count(const eval::AnnotatedSample& sample) override {
    mock::Scene scene = mock::Scene::from_json_file(sample.image_path);
    RawImage img = scene.render();
    mock::MockSegmenter seg({.min_region_px = cfg_.mock.min_region_px,
                             .feature_cell_px = cfg_.mock.cell_px,
                             .feature_jitter = cfg_.mock.jitter,
                             .seed = cfg_.seed});
    std::unique_ptr<mock::MockSemanticEncoder> sem;
    if (cfg_.semantic.model != "segmenter") {
      sem = std::make_unique<mock::MockSemanticEncoder>(
          scene, mock::MockSemanticOptions{cfg_.mock.cell_px, cfg_.mock.jitter, cfg_.seed});
    }
    proposals::ReferenceSpec refs;
    if (cfg_.eval.ref_format == "points") {
      refs.format = proposals::RefFormat::points;
      refs.points = scene.reference_points();
    } else {
      refs.format = proposals::RefFormat::boxes;
      refs.boxes = scene.reference_boxes();
    }
    auto res = pipeline::run_count(img, refs, cfg_, seg, sem.get());
    return res.count.count;
  }

 private:
  RunConfig cfg_;
};

inline eval::CounterFactory scene_counter_factory() {
  return [](const RunConfig& cfg) -> std::unique_ptr<eval::SampleCounter> {
    return std::make_unique<ScenePipelineCounter>(cfg);
  };
}

}  // namespace maskcount::testing
