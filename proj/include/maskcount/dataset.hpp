// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "maskcount/geometry.hpp"

namespace maskcount::eval {

struct AnnotatedSample {
  std::string id;
  std::string image_path;  // or scene json path for the synthetic dataset
  std::vector<Box> exemplar_boxes;
  std::vector<Point> exemplar_points;
  double ground_truth = 0.0;  // dot-annotation count / box count / scene count
  std::string split;
  std::string category;
};

// Counting benchmark layout: root/annotation_FSC147_384.json (per-image
// exemplar box corners + dot annotations), root/Train_Test_Val_FSC_147.json
// (split lists), root/images_384_VarV2/. Ground truth is the number of dot
// annotations.
std::vector<AnnotatedSample> load_fsc147(const std::string& root,
                                         const std::string& split = "test");

struct CrossImageExemplar {
  std::string id;  // "<image>#<box index>"
  std::string image_path;
  Box box;
};

struct CarpkDataset {
  std::vector<AnnotatedSample> samples;         // test images; y = box count
  std::vector<CrossImageExemplar> exemplars;    // sampled from the train split
};

// Drone car-park layout: root/ImageSets/<split>.txt, root/Annotations/<id>.txt
// ("x1 y1 x2 y2 class" per box), root/Images/<id>.png. Exemplars are sampled
// (seeded) from train-split boxes and shared across every test image.
CarpkDataset load_carpk(const std::string& root, const std::string& split = "test",
                        int exemplar_count = 12, uint64_t seed = 0);

// Directory of synthetic scene json files (sorted by name).
std::vector<AnnotatedSample> load_mock_scenes(const std::string& dir);

}  // namespace maskcount::eval
