// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "corpus.hpp"
#include "maskcount/dataset.hpp"
#include "maskcount/metrics.hpp"
#include "maskcount/sweep.hpp"
#include "oracles.hpp"

using namespace maskcount;
using namespace maskcount::eval;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("maskcount_test_" + tag + "_" +
                                        std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream f(p);
  f << text;
}

// minimal counting-benchmark fixture: 3 test images, json annotations
void write_fsc_fixture(const fs::path& root) {
  nlohmann::json anno;
  for (int i = 0; i < 3; ++i) {
    std::string name = "img" + std::to_string(i) + ".ppm";
    nlohmann::json rec;
    rec["box_examples_coordinates"] = nlohmann::json::array();
    for (int b = 0; b < 3; ++b) {
      int x = 4 + 10 * b, y = 6;
      rec["box_examples_coordinates"].push_back(
          {{x, y}, {x + 8, y}, {x + 8, y + 8}, {x, y + 8}});
    }
    rec["points"] = nlohmann::json::array();
    for (int k = 0; k < 5 + i; ++k) rec["points"].push_back({3 * k, 2 * k});
    anno[name] = rec;
    fs::create_directories(root / "images_384_VarV2");
    RawImage img = RawImage::filled(48, 48, Rgb{(uint8_t)(30 + i), 40, 50});
    write_ppm((root / "images_384_VarV2" / name).string(), img);
  }
  nlohmann::json splits;
  splits["test"] = {"img0.ppm", "img1.ppm", "img2.ppm"};
  splits["train"] = nlohmann::json::array();
  splits["val"] = nlohmann::json::array();
  write_file(root / "annotation_FSC147_384.json", anno.dump());
  write_file(root / "Train_Test_Val_FSC_147.json", splits.dump());
}

void write_carpk_fixture(const fs::path& root) {
  write_file(root / "ImageSets" / "test.txt", "t0\nt1\n");
  write_file(root / "ImageSets" / "train.txt", "tr0\ntr1\n");
  auto boxes = [](int n) {
    std::string s;
    for (int i = 0; i < n; ++i) {
      int x = 5 + 12 * i;
      s += std::to_string(x) + " 10 " + std::to_string(x + 9) + " 20 1\n";
    }
    return s;
  };
  write_file(root / "Annotations" / "t0.txt", boxes(4));
  write_file(root / "Annotations" / "t1.txt", boxes(7));
  write_file(root / "Annotations" / "tr0.txt", boxes(10));
  write_file(root / "Annotations" / "tr1.txt", boxes(9));
  fs::create_directories(root / "Images");
  for (const char* n : {"t0", "t1", "tr0", "tr1"}) {
    write_ppm((root / "Images" / (std::string(n) + ".ppm")).string(),
              RawImage::filled(32, 128, Rgb{90, 90, 90}));
  }
}

}  // namespace

TEST_CASE("compute_metrics") {
  SUBCASE("perfect prediction") {
    std::vector<std::pair<double, double>> p{{5, 5}};
    auto [mae, rmse] = compute_metrics(p);
    CHECK(mae == 0.0);
    CHECK(rmse == 0.0);
  }
  SUBCASE("hand case: {(0,3),(4,0)}") {
    std::vector<std::pair<double, double>> p{{0, 3}, {4, 0}};
    auto [mae, rmse] = compute_metrics(p);
    CHECK(mae == doctest::Approx(3.5).epsilon(1e-15));
    CHECK(rmse == doctest::Approx(3.5355339059327378).epsilon(1e-12));
  }
  SUBCASE("identical error magnitudes make MAE equal RMSE") {
    std::vector<std::pair<double, double>> p{{10, 7}, {2, 5}, {6, 3}};
    auto [mae, rmse] = compute_metrics(p);
    CHECK(mae == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(rmse == doctest::Approx(3.0).epsilon(1e-15));
  }
  SUBCASE("empty input is rejected") {
    std::vector<std::pair<double, double>> p;
    CHECK_THROWS_AS((void)compute_metrics(p), Error);
  }
  SUBCASE("rmse >= mae on random sets, and both match the oracle") {
    Rng rng(21);
    for (int iter = 0; iter < 200; ++iter) {
      std::vector<std::pair<double, double>> p;
      int n = rng.irange(1, 40);
      for (int i = 0; i < n; ++i) p.push_back({rng.range(0, 100), rng.range(0, 100)});
      auto [mae, rmse] = compute_metrics(p);
      auto [omae, ormse] = oracle::metrics_direct(p);
      CHECK(rmse >= mae - 1e-12);
      CHECK(mae == doctest::Approx(omae).epsilon(1e-12));
      CHECK(rmse == doctest::Approx(ormse).epsilon(1e-12));
    }
  }
}

TEST_CASE("counting-benchmark ingestion") {
  TempDir dir("fsc");
  write_fsc_fixture(dir.path);
  auto samples = load_fsc147(dir.str(), "test");
  REQUIRE(samples.size() == 3);
  CHECK(samples[0].exemplar_boxes.size() == 3);
  CHECK(samples[0].ground_truth == 5.0);
  CHECK(samples[2].ground_truth == 7.0);
  CHECK(samples[0].exemplar_boxes[0] == Box{4, 6, 12, 14});

  SUBCASE("missing image is reported with its path") {
    fs::remove(dir.path / "images_384_VarV2" / "img1.ppm");
    CHECK_THROWS_WITH_AS((void)load_fsc147(dir.str(), "test"),
                         doctest::Contains("img1.ppm"), Error);
  }
  SUBCASE("empty root is an ingestion error") {
    TempDir empty("fsc_empty");
    CHECK_THROWS_AS((void)load_fsc147(empty.str(), "test"), Error);
  }
  SUBCASE("malformed record names the sample") {
    auto anno_path = dir.path / "annotation_FSC147_384.json";
    std::ifstream in(anno_path);
    nlohmann::json anno;
    in >> anno;
    in.close();
    anno["img1.ppm"].erase("points");
    write_file(anno_path, anno.dump());
    CHECK_THROWS_WITH_AS((void)load_fsc147(dir.str(), "test"), doctest::Contains("img1"),
                         Error);
  }
  SUBCASE("unknown split is rejected") {
    CHECK_THROWS_AS((void)load_fsc147(dir.str(), "dev"), Error);
  }
}

TEST_CASE("car-park ingestion and exemplar sampling") {
  TempDir dir("carpk");
  write_carpk_fixture(dir.path);
  auto ds = load_carpk(dir.str(), "test", 12, 7);
  REQUIRE(ds.samples.size() == 2);
  CHECK(ds.samples[0].ground_truth == 4.0);
  CHECK(ds.samples[1].ground_truth == 7.0);
  REQUIRE(ds.exemplars.size() == 12);
  // deterministic for a fixed seed, different for another
  auto ds2 = load_carpk(dir.str(), "test", 12, 7);
  for (size_t i = 0; i < 12; ++i) CHECK(ds.exemplars[i].id == ds2.exemplars[i].id);
  auto ds3 = load_carpk(dir.str(), "test", 12, 8);
  bool same = true;
  for (size_t i = 0; i < 12; ++i) same &= ds.exemplars[i].id == ds3.exemplars[i].id;
  CHECK(!same);
  // exemplar ids are distinct
  std::set<std::string> ids;
  for (const auto& e : ds.exemplars) ids.insert(e.id);
  CHECK(ids.size() == 12);

  SUBCASE("too few train boxes") {
    CHECK_THROWS_AS((void)load_carpk(dir.str(), "test", 100, 0), Error);
  }
  SUBCASE("missing annotation file names the sample") {
    fs::remove(dir.path / "Annotations" / "t1.txt");
    CHECK_THROWS_WITH_AS((void)load_carpk(dir.str(), "test", 12, 0),
                         doctest::Contains("t1"), Error);
  }
}

// Full-dataset layouts are only checkable when the datasets are installed;
// point the env vars at them to enable these.
TEST_CASE("real dataset split sizes (env-gated)") {
  if (const char* root = std::getenv("MASKCOUNT_FSC147_ROOT")) {
    auto samples = load_fsc147(root, "test");
    CHECK(samples.size() == 1190);
    for (const auto& s : samples) CHECK(s.exemplar_boxes.size() == 3);
  }
  if (const char* root = std::getenv("MASKCOUNT_CARPK_ROOT")) {
    auto ds = load_carpk(root, "test", 12, 0);
    CHECK(ds.samples.size() == 459);
    CHECK(ds.exemplars.size() == 12);
  }
}

TEST_CASE("scene-directory ingestion") {
  TempDir dir("scenes");
  testing::CorpusParams p;
  p.scenes = 3;
  p.seed = 60;
  auto scenes = testing::make_corpus(p);
  testing::write_corpus(dir.str(), scenes);
  auto samples = load_mock_scenes(dir.str());
  REQUIRE(samples.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(samples[i].ground_truth == scenes[i].target_count());
    CHECK(samples[i].exemplar_boxes.size() == 3);
  }
  SUBCASE("empty directory is an ingestion error") {
    TempDir empty("scenes_empty");
    CHECK_THROWS_AS((void)load_mock_scenes(empty.str()), Error);
  }
}

TEST_CASE("run_eval over the synthetic corpus") {
  TempDir dir("eval");
  testing::CorpusParams p;
  p.scenes = 5;
  p.seed = 42;
  testing::write_corpus(dir.str(), testing::make_corpus(p));
  auto samples = load_mock_scenes(dir.str());
  RunConfig cfg;

  auto rep = run_eval(samples, cfg, testing::scene_counter_factory(), "mock");
  CHECK(rep.per_sample.size() == 5);
  CHECK(rep.mae == 0.0);
  CHECK(rep.rmse == 0.0);
  CHECK(rep.rmse >= rep.mae);

  SUBCASE("report bodies are deterministic") {
    auto rep2 = run_eval(samples, cfg, testing::scene_counter_factory(), "mock");
    CHECK(rep.canonical_body() == rep2.canonical_body());
  }
  SUBCASE("parallel workers produce the same body") {
    RunConfig par = cfg;
    par.eval.workers = 2;
    auto rep2 = run_eval(samples, par, testing::scene_counter_factory(), "mock");
    // worker count is part of the config snapshot; compare sample rows + metrics
    CHECK(rep2.mae == rep.mae);
    CHECK(rep2.rmse == rep.rmse);
    REQUIRE(rep2.per_sample.size() == rep.per_sample.size());
    for (size_t i = 0; i < rep.per_sample.size(); ++i) {
      CHECK(rep2.per_sample[i].id == rep.per_sample[i].id);
      CHECK(rep2.per_sample[i].yhat == rep.per_sample[i].yhat);
    }
  }
  SUBCASE("resume skips journaled samples") {
    std::string journal = dir.str() + "/journal.jsonl";
    RunConfig rcfg = cfg;
    rcfg.eval.resume = true;
    // pre-journal two fabricated rows; the runner must keep them as-is
    {
      std::ofstream f(journal);
      f << R"({"id":")" << samples[0].id << R"(","y":123,"yhat":99,"wall_ms":1.0})" << "\n";
      f << R"({"id":")" << samples[2].id << R"(","y":7,"yhat":7,"wall_ms":1.0})" << "\n";
    }
    auto rep2 = run_eval(samples, rcfg, testing::scene_counter_factory(), "mock", journal);
    CHECK(rep2.per_sample[0].yhat == 99.0);  // taken from the journal
    CHECK(rep2.per_sample[2].yhat == 7.0);
    CHECK(rep2.per_sample[1].yhat == rep.per_sample[1].yhat);  // freshly computed
  }
}

TEST_CASE("eval report json shape") {
  EvalReport rep;
  rep.dataset = "mock";
  rep.config_json = RunConfig{}.to_json_text();
  rep.per_sample = {{"a", 5, 5, 0, 1.5}, {"b", 7, 9, 0, 2.5}};
  rep.finalize();
  CHECK(rep.mae == doctest::Approx(1.0));
  CHECK(rep.rmse == doctest::Approx(std::sqrt(2.0)));
  auto j = nlohmann::json::parse(rep.to_json_text());
  CHECK(j.contains("config"));
  CHECK(j.contains("per_sample"));
  CHECK(j.contains("mae"));
  CHECK(j.contains("rmse"));
  CHECK(j.contains("timing"));
  CHECK(j["timing"].contains("runtime_s"));
  // canonical body excludes timing
  auto body = nlohmann::json::parse(rep.canonical_body());
  CHECK(!body.contains("timing"));
}

TEST_CASE("sweep axes") {
  RunConfig base;
  SUBCASE("theta axis sets matching.theta") {
    auto vars = expand_axis(base, SweepAxis::theta, {"0.3", "0.5"});
    REQUIRE(vars.size() == 2);
    CHECK(vars[0].cfg.matching.theta == 0.3);
    CHECK(vars[1].cfg.matching.theta == 0.5);
  }
  SUBCASE("components matrix expands to 16 rows") {
    auto vars = expand_axis(base, SweepAxis::components, {"matrix"});
    REQUIRE(vars.size() == 16);
    std::set<std::string> labels;
    for (const auto& v : vars) labels.insert(v.label);
    CHECK(labels.size() == 16);
    CHECK(labels.count("-") == 1);
    CHECK(labels.count("sp+sem+tpu+ms") == 1);
  }
  SUBCASE("component toggles map onto config") {
    auto vars = expand_axis(base, SweepAxis::components, {"sp+tpu"});
    REQUIRE(vars.size() == 1);
    const auto& cfg = vars[0].cfg;
    CHECK(cfg.prompts.mode == "superpixel");
    CHECK(cfg.semantic.model == "segmenter");
    CHECK(cfg.matching.tpu_rounds == 1);
    CHECK(!cfg.multiscale.enabled);
  }
  SUBCASE("unknown axis or value is a usage error") {
    CHECK_THROWS_AS((void)parse_axis("gamma"), Error);
    CHECK_THROWS_AS((void)expand_axis(base, SweepAxis::components, {"sp+warp"}), Error);
    CHECK_THROWS_AS((void)expand_axis(base, SweepAxis::theta, {"abc"}), Error);
  }
}

TEST_CASE("sweep consistency: the all-on cell equals a standalone run") {
  TempDir dir("sweepc");
  testing::CorpusParams p;
  p.scenes = 3;
  p.seed = 8;
  testing::write_corpus(dir.str(), testing::make_corpus(p));
  auto samples = load_mock_scenes(dir.str());
  RunConfig base;

  auto reports = run_sweep(samples, base, SweepAxis::components, {"all"},
                           testing::scene_counter_factory(), "mock");
  REQUIRE(reports.size() == 1);
  auto vars = expand_axis(base, SweepAxis::components, {"all"});
  auto standalone = run_eval(samples, vars[0].cfg, testing::scene_counter_factory(), "mock");
  CHECK(reports[0].canonical_body() == standalone.canonical_body());
}

TEST_CASE("theta sweep counts are non-increasing on the synthetic corpus") {
  TempDir dir("sweept");
  testing::CorpusParams p;
  p.scenes = 2;
  p.seed = 5;
  testing::write_corpus(dir.str(), testing::make_corpus(p));
  auto samples = load_mock_scenes(dir.str());
  RunConfig base;
  auto reports = run_sweep(samples, base, SweepAxis::theta,
                           {"0.1", "0.3", "0.5", "0.7", "0.9", "0.99"},
                           testing::scene_counter_factory(), "mock");
  for (size_t s = 0; s < samples.size(); ++s) {
    for (size_t i = 1; i < reports.size(); ++i) {
      CHECK(reports[i].per_sample[s].yhat <= reports[i - 1].per_sample[s].yhat);
    }
  }
}
