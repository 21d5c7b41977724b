// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#include "maskcount/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "maskcount/common.hpp"
#include "maskcount/mock_backend.hpp"

namespace maskcount::eval {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

json load_json_file(const std::string& path, const char* what) {
  std::ifstream f(path);
  if (!f) fail(errc::ingestion, std::string(what) + " not found: " + path);
  json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    fail(errc::ingestion, std::string("malformed ") + what + " (" + path + "): " + e.what());
  }
  return j;
}

}  // namespace

std::vector<AnnotatedSample> load_fsc147(const std::string& root, const std::string& split) {
  const std::string anno_path = root + "/annotation_FSC147_384.json";
  const std::string split_path = root + "/Train_Test_Val_FSC_147.json";
  const std::string image_dir = root + "/images_384_VarV2";
  if (!fs::is_directory(image_dir)) {
    fail(errc::ingestion, "image directory not found: " + image_dir);
  }
  json anno = load_json_file(anno_path, "annotation file");
  json splits = load_json_file(split_path, "split file");
  if (!splits.contains(split)) {
    fail(errc::ingestion, "split '" + split + "' missing from " + split_path);
  }

  std::vector<AnnotatedSample> out;
  for (const auto& name_j : splits[split]) {
    std::string name = name_j.get<std::string>();
    AnnotatedSample s;
    s.id = name;
    s.split = split;
    s.image_path = image_dir + "/" + name;
    if (!fs::exists(s.image_path)) {
      fail(errc::ingestion, "sample " + name + ": image missing: " + s.image_path);
    }
    if (!anno.contains(name)) {
      fail(errc::ingestion, "sample " + name + ": no annotation record");
    }
    const json& rec = anno[name];
    try {
      // exemplar boxes arrive as 4 corner points, [x, y] each; corners 0 and
      // 2 are the opposite extremes
      for (const auto& corners : rec.at("box_examples_coordinates")) {
        double x1 = corners.at(0).at(0).get<double>();
        double y1 = corners.at(0).at(1).get<double>();
        double x2 = corners.at(2).at(0).get<double>();
        double y2 = corners.at(2).at(1).get<double>();
        Box b{(int)std::lround(std::min(x1, x2)), (int)std::lround(std::min(y1, y2)),
              (int)std::lround(std::max(x1, x2)), (int)std::lround(std::max(y1, y2))};
        if (b.empty()) fail(errc::ingestion, "sample " + name + ": empty exemplar box");
        s.exemplar_boxes.push_back(b);
        s.exemplar_points.push_back(b.center());
      }
      s.ground_truth = (double)rec.at("points").size();
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      fail(errc::ingestion, "sample " + name + ": malformed record: " + e.what());
    }
    if (s.exemplar_boxes.empty()) {
      fail(errc::ingestion, "sample " + name + ": no exemplar boxes");
    }
    if (s.ground_truth < (double)s.exemplar_boxes.size()) {
      fail(errc::ingestion, "sample " + name + ": dot count below exemplar count");
    }
    out.push_back(std::move(s));
  }
  if (out.empty()) fail(errc::ingestion, "split '" + split + "' is empty");
  return out;
}

namespace {

std::vector<std::string> read_id_list(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(errc::ingestion, "split file not found: " + path);
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(f, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) ids.push_back(line);
  }
  if (ids.empty()) fail(errc::ingestion, "split file is empty: " + path);
  return ids;
}

std::vector<Box> read_carpk_boxes(const std::string& path, const std::string& id) {
  std::ifstream f(path);
  if (!f) fail(errc::ingestion, "sample " + id + ": annotation missing: " + path);
  std::vector<Box> boxes;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    double x1, y1, x2, y2;
    if (!(ss >> x1 >> y1 >> x2 >> y2)) {
      fail(errc::ingestion,
           "sample " + id + ": malformed box at line " + std::to_string(lineno));
    }
    boxes.push_back(Box{(int)std::lround(std::min(x1, x2)), (int)std::lround(std::min(y1, y2)),
                        (int)std::lround(std::max(x1, x2)), (int)std::lround(std::max(y1, y2))});
  }
  return boxes;
}

std::string carpk_image_path(const std::string& root, const std::string& id) {
  for (const char* ext : {".png", ".jpg", ".jpeg", ".ppm"}) {
    std::string p = root + "/Images/" + id + ext;
    if (fs::exists(p)) return p;
  }
  fail(errc::ingestion, "sample " + id + ": image missing under " + root + "/Images");
}

}  // namespace

CarpkDataset load_carpk(const std::string& root, const std::string& split, int exemplar_count,
                        uint64_t seed) {
  CarpkDataset ds;
  for (const std::string& id : read_id_list(root + "/ImageSets/" + split + ".txt")) {
    AnnotatedSample s;
    s.id = id;
    s.split = split;
    s.image_path = carpk_image_path(root, id);
    auto boxes = read_carpk_boxes(root + "/Annotations/" + id + ".txt", id);
    s.ground_truth = (double)boxes.size();
    s.exemplar_boxes = std::move(boxes);  // kept for reference; not prompts
    ds.samples.push_back(std::move(s));
  }

  // cross-image exemplars from the training split
  auto train_ids = read_id_list(root + "/ImageSets/train.txt");
  std::vector<CrossImageExemplar> pool;
  for (const std::string& id : train_ids) {
    auto boxes = read_carpk_boxes(root + "/Annotations/" + id + ".txt", id);
    for (size_t bi = 0; bi < boxes.size(); ++bi) {
      pool.push_back({id + "#" + std::to_string(bi), carpk_image_path(root, id), boxes[bi]});
    }
  }
  if ((int)pool.size() < exemplar_count) {
    fail(errc::ingestion, "train split provides fewer boxes than requested exemplars");
  }
  Rng rng(splitmix64(seed ^ 0xca49c0de));
  for (int k = 0; k < exemplar_count; ++k) {
    size_t pick = k + rng.bounded((uint32_t)(pool.size() - k));
    std::swap(pool[k], pool[pick]);
    ds.exemplars.push_back(pool[k]);
  }
  return ds;
}

std::vector<AnnotatedSample> load_mock_scenes(const std::string& dir) {
  if (!fs::is_directory(dir)) fail(errc::ingestion, "scene directory not found: " + dir);
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".json") files.push_back(e.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) fail(errc::ingestion, "no scene json files in " + dir);
  std::vector<AnnotatedSample> out;
  for (const auto& f : files) {
    mock::Scene sc = mock::Scene::from_json_file(f);
    AnnotatedSample s;
    s.id = fs::path(f).stem().string();
    s.image_path = f;
    s.ground_truth = sc.target_count();
    s.exemplar_boxes = sc.reference_boxes();
    s.exemplar_points = sc.reference_points();
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace maskcount::eval
