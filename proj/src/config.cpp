// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#include "maskcount/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "maskcount/common.hpp"

namespace maskcount {

namespace {

using json = nlohmann::ordered_json;

struct FieldDef {
  std::string path;
  std::function<json(const RunConfig&)> get;
  std::function<void(RunConfig&, const json&)> set;
};

template <typename T>
T checked_get(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const std::exception&) {
    fail(errc::usage, "config: bad value for '" + path + "'");
  }
}

const std::vector<FieldDef>& fields() {
  static const std::vector<FieldDef> defs = [] {
    std::vector<FieldDef> v;
    // field order here defines the serialized order
    auto addf = [&](std::string path, auto getter, auto setter) {
      v.push_back(FieldDef{path, getter, setter});
    };
#define MC_FIELD(PATH, REF)                                                        \
  addf(PATH, [](const RunConfig& c) { return json(c.REF); },                       \
       [](RunConfig& c, const json& j) {                                           \
         c.REF = checked_get<std::remove_reference_t<decltype(c.REF)>>(j, PATH);   \
       })
    MC_FIELD("superpixel.k", superpixel.k);
    MC_FIELD("superpixel.compactness", superpixel.compactness);
    MC_FIELD("superpixel.max_iterations", superpixel.max_iterations);
    MC_FIELD("prompts.mode", prompts.mode);
    MC_FIELD("prompts.grid_side", prompts.grid_side);
    MC_FIELD("multiscale.enabled", multiscale.enabled);
    MC_FIELD("multiscale.n_p", multiscale.n_p);
    MC_FIELD("dedup.iou_threshold", dedup.iou_threshold);
    MC_FIELD("matching.theta", matching.theta);
    MC_FIELD("matching.delta", matching.delta);
    MC_FIELD("matching.tpu_rounds", matching.tpu_rounds);
    MC_FIELD("matching.mask_interp", matching.mask_interp);
    MC_FIELD("segmenter.variant", segmenter.variant);
    MC_FIELD("segmenter.weights_path", segmenter.weights_path);
    MC_FIELD("semantic.model", semantic.model);
    MC_FIELD("semantic.weights_path", semantic.weights_path);
    MC_FIELD("semantic.input_size", semantic.input_size);
    MC_FIELD("semantic.drop_tokens", semantic.drop_tokens);
    MC_FIELD("mock.min_region_px", mock.min_region_px);
    MC_FIELD("mock.cell_px", mock.cell_px);
    MC_FIELD("mock.jitter", mock.jitter);
    MC_FIELD("eval.workers", eval.workers);
    MC_FIELD("eval.resume", eval.resume);
    MC_FIELD("eval.carpk_exemplars", eval.carpk_exemplars);
    MC_FIELD("eval.ref_format", eval.ref_format);
    MC_FIELD("kernels.isa", kernels.isa);
    MC_FIELD("seed", seed);
#undef MC_FIELD
    return v;
  }();
  return defs;
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
  } else {
    out.emplace_back(prefix, j);
  }
}

void set_nested(json& root, const std::string& path, json value) {
  json* cur = &root;
  size_t start = 0;
  while (true) {
    size_t dot = path.find('.', start);
    if (dot == std::string::npos) {
      (*cur)[path.substr(start)] = std::move(value);
      return;
    }
    cur = &(*cur)[path.substr(start, dot - start)];
    start = dot + 1;
  }
}

const FieldDef* find_field(const std::string& path) {
  for (const auto& f : fields()) {
    if (f.path == path) return &f;
  }
  return nullptr;
}

json parse_scalar_text(const std::string& text) {
  // try json scalar first (numbers, true/false), fall back to string
  try {
    json j = json::parse(text);
    if (!j.is_object() && !j.is_array()) return j;
  } catch (const std::exception&) {
  }
  return json(text);
}

template <typename T>
bool is_one_of(const T& v, std::initializer_list<T> allowed) {
  for (const auto& a : allowed) {
    if (v == a) return true;
  }
  return false;
}

}  // namespace

void RunConfig::validate() const {
  auto expect = [](bool ok, const std::string& msg) {
    if (!ok) fail(errc::usage, "config: " + msg);
  };
  expect(superpixel.k >= 1, "superpixel.k must be >= 1");
  expect(superpixel.compactness > 0, "superpixel.compactness must be positive");
  expect(superpixel.max_iterations >= 1, "superpixel.max_iterations must be >= 1");
  expect(is_one_of<std::string>(prompts.mode, {"superpixel", "grid"}),
         "prompts.mode must be superpixel|grid");
  expect(prompts.grid_side >= 1, "prompts.grid_side must be >= 1");
  expect(multiscale.n_p >= 1, "multiscale.n_p must be >= 1");
  expect(dedup.iou_threshold > 0 && dedup.iou_threshold <= 1,
         "dedup.iou_threshold must be in (0, 1]");
  expect(matching.theta >= -1 && matching.theta <= 1, "matching.theta must be in [-1, 1]");
  expect(matching.delta >= -1 && matching.delta <= 1, "matching.delta must be in [-1, 1]");
  expect(matching.tpu_rounds >= 0, "matching.tpu_rounds must be >= 0");
  expect(is_one_of<std::string>(matching.mask_interp, {"soft", "hard"}),
         "matching.mask_interp must be soft|hard");
  expect(is_one_of<std::string>(segmenter.variant, {"vit_b", "vit_h", "mock"}),
         "segmenter.variant must be vit_b|vit_h|mock");
  expect(is_one_of<std::string>(semantic.model, {"clip", "dino", "dinov2", "mock", "segmenter"}),
         "semantic.model must be clip|dino|dinov2|mock|segmenter");
  expect(mock.min_region_px >= 1, "mock.min_region_px must be >= 1");
  expect(mock.cell_px >= 1, "mock.cell_px must be >= 1");
  expect(eval.workers >= 1, "eval.workers must be >= 1");
  expect(eval.carpk_exemplars >= 1, "eval.carpk_exemplars must be >= 1");
  expect(is_one_of<std::string>(eval.ref_format, {"boxes", "points"}),
         "eval.ref_format must be boxes|points");
  expect(is_one_of<std::string>(kernels.isa, {"auto", "scalar", "avx2"}),
         "kernels.isa must be auto|scalar|avx2");
}

std::string RunConfig::to_json_text() const {
  json out;
  for (const auto& f : fields()) set_nested(out, f.path, f.get(*this));
  return out.dump(2);
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(errc::usage, std::string("config: invalid json: ") + e.what());
  }
  RunConfig cfg;
  std::vector<std::pair<std::string, json>> kv;
  flatten(j, "", kv);
  for (auto& [path, value] : kv) {
    const FieldDef* f = find_field(path);
    if (!f) fail(errc::usage, "config: unknown key '" + path + "'");
    f->set(cfg, value);
  }
  return cfg;
}

void RunConfig::apply_override(const std::string& assignment) {
  size_t eq = assignment.find('=');
  if (eq == std::string::npos) {
    fail(errc::usage, "config override must look like key=value: " + assignment);
  }
  std::string key = assignment.substr(0, eq);
  std::string value = assignment.substr(eq + 1);
  const FieldDef* f = find_field(key);
  if (!f) fail(errc::usage, "config: unknown key '" + key + "'");
  f->set(*this, parse_scalar_text(value));
}

RunConfig RunConfig::load(const std::string& config_path,
                          const std::vector<std::string>& overrides) {
  RunConfig cfg;
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) fail(errc::usage, "config: cannot open " + config_path);
    std::stringstream ss;
    ss << f.rdbuf();
    cfg = from_json_text(ss.str());
  }
  for (const auto& o : overrides) cfg.apply_override(o);
  cfg.validate();
  return cfg;
}

}  // namespace maskcount
