// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0
//
// maskcount — exemplar-guided object counting over promptable segmentation.
//   count         count one image (or synthetic scene) given exemplars
//   eval          batch evaluation with MAE/RMSE report
//   sweep         parameter/component sweeps over a dataset
//   render-debug  emit prompt/label-map/proposal visualizations

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "maskcount/config.hpp"
#include "maskcount/dataset.hpp"
#include "maskcount/image.hpp"
#include "maskcount/metrics.hpp"
#include "maskcount/mock_backend.hpp"
#include "maskcount/pipeline.hpp"
#include "maskcount/render.hpp"
#include "maskcount/sweep.hpp"

#if defined(MASKCOUNT_WITH_OPENCV)
#include "maskcount/image_codecs.hpp"
#include "maskcount/onnx_backends.hpp"
#endif

namespace fs = std::filesystem;
using namespace maskcount;
using json = nlohmann::ordered_json;

namespace {

RawImage load_any_image(const std::string& path) {
#if defined(MASKCOUNT_WITH_OPENCV)
  return load_image(path);
#else
  return read_ppm(path);
#endif
}

void save_any_image(const std::string& path, const RawImage& img) {
#if defined(MASKCOUNT_WITH_OPENCV)
  save_image(path, img);
#else
  write_ppm(path, img);
#endif
}

struct Backends {
  std::unique_ptr<SegmenterBackend> seg;
  std::unique_ptr<SemanticEncoderBackend> sem;  // null => segmenter features
};

Backends make_backends(const RunConfig& cfg, const mock::Scene* scene) {
  Backends b;
  if (cfg.segmenter.variant == "mock") {
    mock::MockSegmenterOptions o;
    o.min_region_px = cfg.mock.min_region_px;
    o.feature_cell_px = cfg.mock.cell_px;
    o.feature_jitter = cfg.mock.jitter;
    o.seed = cfg.seed;
    b.seg = std::make_unique<mock::MockSegmenter>(o);
  } else {
#if defined(MASKCOUNT_WITH_OPENCV)
    onnx::SamSegmenterConfig sc;
    sc.variant = cfg.segmenter.variant;
    sc.weights_dir = cfg.segmenter.weights_path;
    b.seg = std::make_unique<onnx::OnnxSamSegmenter>(sc);
#else
    fail(errc::backend_load, "this build has no model runtime; use segmenter.variant=mock");
#endif
  }

  if (cfg.semantic.model == "segmenter") {
    b.sem = nullptr;
  } else if (cfg.semantic.model == "mock") {
    if (!scene) {
      fail(errc::usage, "semantic.model=mock needs a scene file (its class palette)");
    }
    mock::MockSemanticOptions o;
    o.cell_px = cfg.mock.cell_px;
    o.jitter = cfg.mock.jitter;
    o.seed = cfg.seed;
    b.sem = std::make_unique<mock::MockSemanticEncoder>(*scene, o);
  } else {
#if defined(MASKCOUNT_WITH_OPENCV)
    onnx::VitSemanticConfig vc = onnx::vit_semantic_preset(cfg.semantic.model);
    vc.weights_path = cfg.semantic.weights_path;
    if (cfg.semantic.input_size > 0) vc.input_size = cfg.semantic.input_size;
    if (cfg.semantic.drop_tokens >= 0) vc.drop_tokens = cfg.semantic.drop_tokens;
    b.sem = std::make_unique<onnx::OnnxVitSemantic>(vc);
#else
    fail(errc::backend_load, "this build has no model runtime; use semantic.model=mock");
#endif
  }
  return b;
}

proposals::ReferenceSpec refs_from_sample(const eval::AnnotatedSample& s, const RunConfig& cfg) {
  proposals::ReferenceSpec refs;
  if (cfg.eval.ref_format == "points" && !s.exemplar_points.empty()) {
    refs.format = proposals::RefFormat::points;
    refs.points = s.exemplar_points;
  } else {
    refs.format = proposals::RefFormat::boxes;
    refs.boxes = s.exemplar_boxes;
  }
  return refs;
}

// Counts one synthetic scene end to end with per-scene mock backends.
class MockSceneCounter : public eval::SampleCounter {
 public:
  explicit MockSceneCounter(const RunConfig& cfg) : cfg_(cfg) {}
  double count(const eval::AnnotatedSample& sample) override {
    mock::Scene scene = mock::Scene::from_json_file(sample.image_path);
    RawImage img = scene.render();
    RunConfig cfg = cfg_;
    cfg.segmenter.variant = "mock";
    if (cfg.semantic.model != "segmenter") cfg.semantic.model = "mock";
    Backends b = make_backends(cfg, &scene);
    auto refs = refs_from_sample(sample, cfg);
    auto res = pipeline::run_count(img, refs, cfg, *b.seg, b.sem.get());
    return res.count.count;
  }

 private:
  RunConfig cfg_;
};

// Counts annotated photographs with in-image exemplars.
class ImageCounter : public eval::SampleCounter {
 public:
  explicit ImageCounter(const RunConfig& cfg)
      : cfg_(cfg), backends_(make_backends(cfg, nullptr)) {}
  double count(const eval::AnnotatedSample& sample) override {
    RawImage img = load_any_image(sample.image_path);
    auto refs = refs_from_sample(sample, cfg_);
    auto res = pipeline::run_count(img, refs, cfg_, *backends_.seg, backends_.sem.get());
    return res.count.count;
  }

 private:
  RunConfig cfg_;
  Backends backends_;
};

// Counts with a fixed cross-image prototype (no in-image exemplars).
class PrototypeCounter : public eval::SampleCounter {
 public:
  PrototypeCounter(const RunConfig& cfg, matching::Prototype proto)
      : cfg_(cfg), proto_(std::move(proto)), backends_(make_backends(cfg, nullptr)) {}
  double count(const eval::AnnotatedSample& sample) override {
    RawImage img = load_any_image(sample.image_path);
    auto res = pipeline::run_count_with_prototype(img, proto_, cfg_, *backends_.seg,
                                                  backends_.sem.get());
    return res.count.count;
  }

 private:
  RunConfig cfg_;
  matching::Prototype proto_;
  Backends backends_;
};

struct DatasetBundle {
  std::vector<eval::AnnotatedSample> samples;
  eval::CounterFactory factory;
  std::vector<std::string> exemplar_ids;
};

DatasetBundle open_dataset(const std::string& name, const std::string& root,
                           const RunConfig& cfg) {
  DatasetBundle ds;
  if (name == "mock") {
    ds.samples = eval::load_mock_scenes(root);
    ds.factory = [](const RunConfig& c) -> std::unique_ptr<eval::SampleCounter> {
      return std::make_unique<MockSceneCounter>(c);
    };
  } else if (name == "fsc147") {
    ds.samples = eval::load_fsc147(root, "test");
    ds.factory = [](const RunConfig& c) -> std::unique_ptr<eval::SampleCounter> {
      return std::make_unique<ImageCounter>(c);
    };
  } else if (name == "carpk") {
    auto carpk = eval::load_carpk(root, "test", cfg.eval.carpk_exemplars, cfg.seed);
    ds.samples = std::move(carpk.samples);
    for (const auto& e : carpk.exemplars) ds.exemplar_ids.push_back(e.id);
    // exemplar features are pooled once from their source images and shared
    Backends boot = make_backends(cfg, nullptr);
    auto proto = pipeline::build_cross_image_prototype(carpk.exemplars, cfg, *boot.seg,
                                                       boot.sem.get(), load_any_image);
    ds.factory = [proto](const RunConfig& c) -> std::unique_ptr<eval::SampleCounter> {
      return std::make_unique<PrototypeCounter>(c, proto);
    };
  } else {
    fail(errc::usage, "unknown dataset '" + name + "' (fsc147|carpk|mock)");
  }
  return ds;
}

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

Box parse_box(const std::string& text) {
  auto parts = split_csv(text);
  if (parts.size() != 4) fail(errc::usage, "--box wants x0,y0,x1,y1, got '" + text + "'");
  return Box{std::stoi(parts[0]), std::stoi(parts[1]), std::stoi(parts[2]),
             std::stoi(parts[3])};
}

Point parse_point(const std::string& text) {
  auto parts = split_csv(text);
  if (parts.size() != 2) fail(errc::usage, "--point wants x,y, got '" + text + "'");
  return Point{std::stoi(parts[0]), std::stoi(parts[1])};
}

// ---------------------------------------------------------------------------

int cmd_count(const std::string& image_path, const std::string& scene_path,
              const std::vector<std::string>& box_args,
              const std::vector<std::string>& point_args, RunConfig cfg,
              const std::string& render_path, const std::string& out_path) {
  std::optional<mock::Scene> scene;
  RawImage img;
  proposals::ReferenceSpec refs;

  if (!scene_path.empty()) {
    scene = mock::Scene::from_json_file(scene_path);
    img = scene->render();
    cfg.segmenter.variant = "mock";
    if (cfg.semantic.model != "segmenter") cfg.semantic.model = "mock";
    if (!box_args.empty() || !point_args.empty()) {
      fail(errc::usage, "scene runs take exemplars from the scene file");
    }
    if (cfg.eval.ref_format == "points") {
      refs.format = proposals::RefFormat::points;
      refs.points = scene->reference_points();
    } else {
      refs.format = proposals::RefFormat::boxes;
      refs.boxes = scene->reference_boxes();
    }
  } else {
    if (image_path.empty()) fail(errc::usage, "count needs --image or --scene");
    img = load_any_image(image_path);
    if (!box_args.empty() && !point_args.empty()) {
      fail(errc::usage, "give either --box or --point exemplars, not both");
    }
    if (!box_args.empty()) {
      refs.format = proposals::RefFormat::boxes;
      for (const auto& b : box_args) refs.boxes.push_back(parse_box(b));
    } else if (!point_args.empty()) {
      refs.format = proposals::RefFormat::points;
      for (const auto& p : point_args) refs.points.push_back(parse_point(p));
    } else {
      fail(errc::usage, "count needs at least one --box or --point exemplar");
    }
  }

  Backends b = make_backends(cfg, scene ? &*scene : nullptr);
  auto res = pipeline::run_count(img, refs, cfg, *b.seg, b.sem.get());
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";

  std::cout << "count: " << res.count.count << "\n";
  if (!out_path.empty()) {
    json j;
    j["count"] = res.count.count;
    j["n_ref"] = res.count.n_ref;
    j["theta"] = res.count.theta;
    j["selected"] = json::array();
    for (const auto& s : res.count.selected) {
      json e;
      e["similarity"] = s.similarity;
      e["area"] = s.proposal.area;
      e["bbox"] = {s.proposal.bbox.x0, s.proposal.bbox.y0, s.proposal.bbox.x1,
                   s.proposal.bbox.y1};
      j["selected"].push_back(std::move(e));
    }
    std::ofstream f(out_path);
    if (!f) fail(errc::io, "cannot write " + out_path);
    f << j.dump(2) << "\n";
  }
  if (!render_path.empty()) {
    save_any_image(render_path, render::overlay_count(img, res.count));
    std::cout << "overlay: " << render_path << "\n";
  }
  return 0;
}

int cmd_eval(const std::string& dataset, const std::string& root, RunConfig cfg,
             const std::string& out_path) {
  auto ds = open_dataset(dataset, root, cfg);
  std::string journal = out_path.empty() ? "" : out_path + ".partial.jsonl";
  auto report = eval::run_eval(ds.samples, cfg, ds.factory, dataset, journal);
  report.exemplar_ids = ds.exemplar_ids;
  std::cout << "samples: " << report.per_sample.size() << "\nmae: " << report.mae
            << "\nrmse: " << report.rmse << "\n";
  if (!out_path.empty()) {
    report.save(out_path);
    std::error_code ec;
    fs::remove(journal, ec);  // journal only matters for interrupted runs
    std::cout << "report: " << out_path << "\n";
  }
  return 0;
}

int cmd_sweep(const std::string& axis_name, const std::string& values_csv,
              const std::string& dataset, const std::string& root, RunConfig cfg,
              const std::string& out_dir) {
  auto axis = eval::parse_axis(axis_name);
  auto values = split_csv(values_csv);
  auto ds = open_dataset(dataset, root, cfg);
  auto variants = eval::expand_axis(cfg, axis, values);

  std::vector<eval::EvalReport> reports;
  for (const auto& var : variants) {
    auto rep = eval::run_eval(ds.samples, var.cfg, ds.factory, dataset);
    rep.exemplar_ids = ds.exemplar_ids;
    std::cout << axis_name << "=" << var.label << " mae=" << rep.mae << " rmse=" << rep.rmse
              << "\n";
    if (!out_dir.empty()) {
      fs::create_directories(out_dir);
      std::string label = var.label;
      for (auto& ch : label) {
        if (ch == '+' || ch == '.') ch = '_';
      }
      rep.save(out_dir + "/" + axis_name + "_" + label + ".json");
    }
    reports.push_back(std::move(rep));
  }
  std::string summary = eval::sweep_summary(variants, reports);
  if (!out_dir.empty()) {
    std::ofstream f(out_dir + "/summary.tsv");
    f << summary;
    std::cout << "summary: " << out_dir << "/summary.tsv\n";
  } else {
    std::cout << summary;
  }
  return 0;
}

int cmd_render_debug(const std::string& image_path, const std::string& scene_path, RunConfig cfg,
                     const std::string& out_dir, int max_masks) {
  std::optional<mock::Scene> scene;
  RawImage img;
  proposals::ReferenceSpec refs;
  if (!scene_path.empty()) {
    scene = mock::Scene::from_json_file(scene_path);
    img = scene->render();
    cfg.segmenter.variant = "mock";
    if (cfg.semantic.model != "segmenter") cfg.semantic.model = "mock";
    refs.format = proposals::RefFormat::boxes;
    refs.boxes = scene->reference_boxes();
  } else {
    if (image_path.empty()) fail(errc::usage, "render-debug needs --image or --scene");
    img = load_any_image(image_path);
    refs.format = proposals::RefFormat::points;
    refs.points = {{img.width / 2, img.height / 2}};  // placeholder exemplar
  }

  Backends b = make_backends(cfg, scene ? &*scene : nullptr);
  pipeline::StageTrace trace;
  auto res = pipeline::run_count(img, refs, cfg, *b.seg, b.sem.get(), &trace);

  fs::create_directories(out_dir);
  save_any_image(out_dir + "/superpixels.ppm",
                 render::label_map_image(trace.full_view_superpixels));

  // composite of every raw proposal, tinted
  RawImage composite = img;
  for (size_t i = 0; i < trace.raw_candidates.size(); ++i) {
    const auto& m = trace.raw_candidates[i];
    Rgb c = render::palette_color(i);
    for (int y = m.bbox.y0; y < m.bbox.y1; ++y) {
      for (int x = m.bbox.x0; x < m.bbox.x1; ++x) {
        if (m.bitmap.get(x, y)) {
          uint8_t* px = composite.at(x, y);
          for (int k = 0; k < 3; ++k) px[k] = (uint8_t)((px[k] + c[k]) / 2);
        }
      }
    }
  }
  save_any_image(out_dir + "/proposals.ppm", composite);

  fs::create_directories(out_dir + "/masks");
  json index = json::array();
  int written = 0;
  for (size_t i = 0; i < trace.raw_candidates.size() && written < max_masks; ++i) {
    const auto& m = trace.raw_candidates[i];
    char name[32];
    std::snprintf(name, sizeof(name), "mask_%04zu.ppm", i);
    save_any_image(out_dir + "/masks/" + name, render::mask_image(m.bitmap));
    json e;
    e["file"] = std::string("masks/") + name;
    e["area"] = m.area;
    e["confidence"] = m.segmenter_confidence;
    e["origin"] = m.origin.kind == OriginKind::full
                      ? std::string("full")
                      : "tile(" + std::to_string(m.origin.row) + "," +
                            std::to_string(m.origin.col) + ")";
    index.push_back(std::move(e));
    ++written;
  }
  std::ofstream f(out_dir + "/index.json");
  f << index.dump(2) << "\n";
  std::cout << "count: " << res.count.count << "\nartifacts: " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exemplar-guided object counting via promptable segmentation"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  uint64_t seed_flag = 0;
  app.add_option("--config", config_path, "json config file")->expected(1);
  app.add_option("--set", overrides, "override config keys (dotted.key=value)");
  auto* seed_opt = app.add_option("--seed", seed_flag, "rng seed for all stochastic choices");

  auto* count = app.add_subcommand("count", "count one image or synthetic scene");
  std::string image_path, scene_path, render_path, out_path;
  std::vector<std::string> boxes, points;
  count->add_option("--image", image_path, "input image (png/jpg/ppm)");
  count->add_option("--scene", scene_path, "synthetic scene json (mock backends)");
  count->add_option("--box", boxes, "exemplar box x0,y0,x1,y1 (repeatable)");
  count->add_option("--point", points, "exemplar point x,y (repeatable)");
  count->add_option("--render", render_path, "write an overlay image here");
  count->add_option("--out", out_path, "write the count result json here");

  auto* evalc = app.add_subcommand("eval", "evaluate a dataset (MAE/RMSE report)");
  std::string dataset, root, report_path;
  evalc->add_option("--dataset", dataset, "fsc147|carpk|mock")->required();
  evalc->add_option("--root", root, "dataset root directory")->required();
  evalc->add_option("--out", report_path, "report json path");
  bool resume = false;
  evalc->add_flag("--resume", resume, "skip samples already in the report journal");

  auto* sweepc = app.add_subcommand("sweep", "run a parameter or component sweep");
  std::string axis, values, sweep_out;
  sweepc->add_option("--axis", axis, "theta|delta|tpu_rounds|components|backbone|semantic")
      ->required();
  sweepc->add_option("--values", values, "comma-separated values ('matrix' for components)")
      ->required();
  sweepc->add_option("--dataset", dataset, "fsc147|carpk|mock")->required();
  sweepc->add_option("--root", root, "dataset root directory")->required();
  sweepc->add_option("--out-dir", sweep_out, "directory for per-value reports + summary");

  auto* dbg = app.add_subcommand("render-debug", "emit label map and raw proposal masks");
  std::string dbg_out = "debug_out";
  int max_masks = 200;
  dbg->add_option("--image", image_path, "input image");
  dbg->add_option("--scene", scene_path, "synthetic scene json");
  dbg->add_option("--out-dir", dbg_out, "output directory");
  dbg->add_option("--max-masks", max_masks, "cap on per-mask files");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = RunConfig::load(config_path, overrides);
    if (!seed_opt->empty()) cfg.seed = seed_flag;
    if (resume) cfg.eval.resume = true;

    if (count->parsed()) {
      return cmd_count(image_path, scene_path, boxes, points, cfg, render_path, out_path);
    }
    if (evalc->parsed()) return cmd_eval(dataset, root, cfg, report_path);
    if (sweepc->parsed()) return cmd_sweep(axis, values, dataset, root, cfg, sweep_out);
    if (dbg->parsed()) return cmd_render_debug(image_path, scene_path, cfg, dbg_out, max_masks);
    std::cerr << "no subcommand\n";
    return (int)errc::usage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return (int)errc::generic;
  }
}
