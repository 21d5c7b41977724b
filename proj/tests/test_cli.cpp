// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0
//
// Process-level checks of the command-line tool: exit codes per error
// class, seeded reproducibility of report bodies, debug artifacts.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "corpus.hpp"

using namespace maskcount;
namespace fs = std::filesystem;

#ifndef MASKCOUNT_CLI
#error "MASKCOUNT_CLI must point at the binary"
#endif

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(MASKCOUNT_CLI) + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  RunResult r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.output.append(buf.data(), n);
  int status = pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("maskcount_cli_" + tag + "_" +
                                        std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string scene_file(const TempDir& dir, uint64_t seed = 123) {
  testing::CorpusParams p;
  p.scenes = 1;
  p.seed = seed;
  auto scenes = testing::make_corpus(p);
  std::string path = dir.str() + "/scene.json";
  std::ofstream f(path);
  f << scenes[0].to_json_text();
  return path;
}

nlohmann::json report_body(const std::string& path) {
  auto j = nlohmann::json::parse(slurp(path));
  j.erase("timing");
  return j;
}

}  // namespace

TEST_CASE("count on a synthetic scene prints the exact count") {
  TempDir dir("count");
  testing::CorpusParams p;
  p.scenes = 1;
  p.seed = 2;
  auto sc = testing::make_corpus(p)[0];
  std::string path = dir.str() + "/scene.json";
  {
    std::ofstream f(path);
    f << sc.to_json_text();
  }
  auto r = run_cli("count --scene " + path + " --out " + dir.str() + "/res.json --render " +
                   dir.str() + "/overlay.ppm");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("count: " + std::to_string(sc.target_count())) != std::string::npos);
  CHECK(fs::exists(dir.str() + "/overlay.ppm"));
  auto j = nlohmann::json::parse(slurp(dir.str() + "/res.json"));
  CHECK(j["count"].get<int>() == sc.target_count());
  CHECK(j["n_ref"].get<int>() == 3);
}

TEST_CASE("exit codes are stable per error class") {
  TempDir dir("codes");
  // usage: unknown config key
  CHECK(run_cli("--set bogus.key=1 count --scene nope.json").exit_code == 2);
  // usage: count without exemplars
  std::string img = dir.str() + "/img.ppm";
  write_ppm(img, RawImage::filled(32, 32, Rgb{5, 5, 5}));
  CHECK(run_cli("count --image " + img).exit_code == 2);
  // ingestion: missing dataset root
  CHECK(run_cli("eval --dataset mock --root " + dir.str() + "/missing").exit_code == 3);
  // ingestion: unreadable scene
  CHECK(run_cli("count --scene " + dir.str() + "/none.json").exit_code == 3);
  // backend load: real segmenter without weights
  CHECK(run_cli("--set segmenter.variant=vit_b count --image " + img + " --point 4,4")
            .exit_code == 4);
  // invalid parameter: n_p larger than the image
  std::string scene = scene_file(dir);
  CHECK(run_cli("--set multiscale.n_p=999 count --scene " + scene).exit_code == 6);
}

TEST_CASE("reference failure exits with its own code") {
  TempDir dir("reffail");
  std::string scene = scene_file(dir);
  // nothing is segmentable at this size limit
  auto r = run_cli("--set mock.min_region_px=100000000 count --scene " + scene);
  CHECK(r.exit_code == 5);
  CHECK(r.output.find("reference") != std::string::npos);
}

TEST_CASE("eval produces a report; identical seeded invocations match bit for bit") {
  TempDir dir("repro");
  testing::CorpusParams p;
  p.scenes = 4;
  p.seed = 99;
  testing::write_corpus(dir.str() + "/scenes", testing::make_corpus(p));

  auto r1 = run_cli("--seed 7 eval --dataset mock --root " + dir.str() + "/scenes --out " +
                    dir.str() + "/rep1.json");
  REQUIRE(r1.exit_code == 0);
  CHECK(r1.output.find("mae: 0") != std::string::npos);
  auto r2 = run_cli("--seed 7 eval --dataset mock --root " + dir.str() + "/scenes --out " +
                    dir.str() + "/rep2.json");
  REQUIRE(r2.exit_code == 0);
  CHECK(report_body(dir.str() + "/rep1.json") == report_body(dir.str() + "/rep2.json"));
  // body dumps are byte-identical, not just semantically equal
  CHECK(report_body(dir.str() + "/rep1.json").dump(2) ==
        report_body(dir.str() + "/rep2.json").dump(2));
}

TEST_CASE("sweep writes per-value reports plus a summary") {
  TempDir dir("sweep");
  testing::CorpusParams p;
  p.scenes = 2;
  p.seed = 11;
  testing::write_corpus(dir.str() + "/scenes", testing::make_corpus(p));
  auto r = run_cli("sweep --axis theta --values 0.3,0.6 --dataset mock --root " + dir.str() +
                   "/scenes --out-dir " + dir.str() + "/out");
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(dir.str() + "/out/theta_0_3.json"));
  CHECK(fs::exists(dir.str() + "/out/theta_0_6.json"));
  CHECK(fs::exists(dir.str() + "/out/summary.tsv"));
  auto summary = slurp(dir.str() + "/out/summary.tsv");
  CHECK(summary.find("value\tmae\trmse") != std::string::npos);
  CHECK(summary.find("0.3") != std::string::npos);
}

TEST_CASE("render-debug emits label map, proposals and an index") {
  TempDir dir("dbg");
  std::string scene = scene_file(dir);
  auto r = run_cli("render-debug --scene " + scene + " --out-dir " + dir.str() +
                   "/dbg --max-masks 10");
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(dir.str() + "/dbg/superpixels.ppm"));
  CHECK(fs::exists(dir.str() + "/dbg/proposals.ppm"));
  CHECK(fs::exists(dir.str() + "/dbg/index.json"));
  auto index = nlohmann::json::parse(slurp(dir.str() + "/dbg/index.json"));
  CHECK(index.is_array());
  CHECK(index.size() <= 10);
  CHECK(fs::exists(dir.str() + "/dbg/" + index[0]["file"].get<std::string>()));
}

TEST_CASE("config file plus flag overrides, flags win") {
  TempDir dir("cfg");
  std::string cfg_path = dir.str() + "/cfg.json";
  {
    std::ofstream f(cfg_path);
    f << R"({"matching": {"theta": 0.9}, "multiscale": {"enabled": false}})";
  }
  std::string scene = scene_file(dir);
  // theta 0.9 still counts everything in the clean corpus; bogus key fails
  auto ok = run_cli("--config " + cfg_path + " count --scene " + scene);
  CHECK(ok.exit_code == 0);
  {
    std::ofstream f(cfg_path);
    f << R"({"matchin": {"theta": 0.9}})";
  }
  CHECK(run_cli("--config " + cfg_path + " count --scene " + scene).exit_code == 2);
}
