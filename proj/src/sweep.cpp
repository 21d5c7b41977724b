// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#include "maskcount/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "maskcount/common.hpp"

namespace maskcount::eval {

namespace {

std::string now_utc() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::set<std::string> read_journal(const std::string& path,
                                   std::vector<SampleResult>& done) {
  std::set<std::string> ids;
  std::ifstream f(path);
  if (!f) return ids;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      SampleResult s;
      s.id = j.at("id").get<std::string>();
      s.y = j.at("y").get<double>();
      s.yhat = j.at("yhat").get<double>();
      s.wall_ms = j.value("wall_ms", 0.0);
      ids.insert(s.id);
      done.push_back(std::move(s));
    } catch (const std::exception&) {
      // ignore torn trailing lines from an interrupted run
    }
  }
  return ids;
}

}  // namespace

EvalReport run_eval(const std::vector<AnnotatedSample>& samples, const RunConfig& cfg,
                    const CounterFactory& factory, const std::string& dataset_name,
                    const std::string& resume_path) {
  if (samples.empty()) fail(errc::invalid_parameter, "run_eval: no samples");

  EvalReport rep;
  rep.dataset = dataset_name;
  rep.config_json = cfg.to_json_text();
  rep.timestamp = now_utc();

  std::vector<SampleResult> resumed;
  std::set<std::string> done_ids;
  if (!resume_path.empty() && cfg.eval.resume) {
    done_ids = read_journal(resume_path, resumed);
  }

  std::vector<SampleResult> results(samples.size());
  std::vector<char> filled(samples.size(), 0);
  for (size_t i = 0; i < samples.size(); ++i) {
    for (const auto& r : resumed) {
      if (r.id == samples[i].id) {
        results[i] = r;
        filled[i] = 1;
        break;
      }
    }
  }

  std::ofstream journal;
  std::mutex journal_mu;
  if (!resume_path.empty()) {
    journal.open(resume_path, std::ios::app);
  }

  auto t0 = std::chrono::steady_clock::now();
  std::atomic<size_t> next{0};
  std::mutex error_mu;
  std::exception_ptr first_error;

  auto worker = [&]() {
    std::unique_ptr<SampleCounter> counter;
    try {
      counter = factory(cfg);
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= samples.size()) break;
        if (filled[i]) continue;
        auto s0 = std::chrono::steady_clock::now();
        double yhat = counter->count(samples[i]);
        auto s1 = std::chrono::steady_clock::now();
        SampleResult r;
        r.id = samples[i].id;
        r.y = samples[i].ground_truth;
        r.yhat = yhat;
        r.wall_ms = std::chrono::duration<double, std::milli>(s1 - s0).count();
        results[i] = r;
        filled[i] = 1;
        if (journal.is_open()) {
          nlohmann::ordered_json j;
          j["id"] = r.id;
          j["y"] = r.y;
          j["yhat"] = r.yhat;
          j["wall_ms"] = r.wall_ms;
          std::lock_guard<std::mutex> lock(journal_mu);
          journal << j.dump() << "\n" << std::flush;
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!first_error) first_error = std::current_exception();
    }
  };

  int workers = std::max(1, cfg.eval.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  rep.per_sample = std::move(results);
  rep.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.finalize();
  return rep;
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "theta") return SweepAxis::theta;
  if (name == "delta") return SweepAxis::delta;
  if (name == "tpu_rounds") return SweepAxis::tpu_rounds;
  if (name == "components") return SweepAxis::components;
  if (name == "backbone") return SweepAxis::backbone;
  if (name == "semantic") return SweepAxis::semantic_model;
  fail(errc::usage, "unknown sweep axis '" + name +
                        "' (theta|delta|tpu_rounds|components|backbone|semantic)");
}

namespace {

struct ComponentToggles {
  bool sp = false, sem = false, tpu = false, ms = false;
};

ComponentToggles parse_components(const std::string& value) {
  ComponentToggles t;
  if (value == "-" || value == "none") return t;
  if (value == "all") return {true, true, true, true};
  std::stringstream ss(value);
  std::string part;
  while (std::getline(ss, part, '+')) {
    if (part == "sp") {
      t.sp = true;
    } else if (part == "sem") {
      t.sem = true;
    } else if (part == "tpu") {
      t.tpu = true;
    } else if (part == "ms") {
      t.ms = true;
    } else {
      fail(errc::usage, "components value must combine sp|sem|tpu|ms, got '" + part + "'");
    }
  }
  return t;
}

std::string toggles_label(const ComponentToggles& t) {
  std::string s;
  auto app = [&](bool on, const char* name) {
    if (!on) return;
    if (!s.empty()) s += "+";
    s += name;
  };
  app(t.sp, "sp");
  app(t.sem, "sem");
  app(t.tpu, "tpu");
  app(t.ms, "ms");
  return s.empty() ? "-" : s;
}

RunConfig apply_toggles(RunConfig cfg, const ComponentToggles& t) {
  cfg.prompts.mode = t.sp ? "superpixel" : "grid";
  if (!t.sem) cfg.semantic.model = "segmenter";
  cfg.matching.tpu_rounds = t.tpu ? std::max(1, cfg.matching.tpu_rounds) : 0;
  cfg.multiscale.enabled = t.ms;
  return cfg;
}

}  // namespace

std::vector<SweepVariant> expand_axis(const RunConfig& base, SweepAxis axis,
                                      const std::vector<std::string>& values) {
  if (values.empty()) fail(errc::usage, "sweep: no values given");
  std::vector<SweepVariant> out;
  for (const std::string& v : values) {
    switch (axis) {
      case SweepAxis::theta:
      case SweepAxis::delta: {
        double x;
        try {
          x = std::stod(v);
        } catch (const std::exception&) {
          fail(errc::usage, "sweep: not a number: '" + v + "'");
        }
        RunConfig cfg = base;
        (axis == SweepAxis::theta ? cfg.matching.theta : cfg.matching.delta) = x;
        cfg.validate();
        out.push_back({v, std::move(cfg)});
        break;
      }
      case SweepAxis::tpu_rounds: {
        int r;
        try {
          r = std::stoi(v);
        } catch (const std::exception&) {
          fail(errc::usage, "sweep: not an integer: '" + v + "'");
        }
        RunConfig cfg = base;
        cfg.matching.tpu_rounds = r;
        cfg.validate();
        out.push_back({v, std::move(cfg)});
        break;
      }
      case SweepAxis::components: {
        if (v == "matrix") {
          for (int bits = 0; bits < 16; ++bits) {
            ComponentToggles t{(bits & 1) != 0, (bits & 2) != 0, (bits & 4) != 0,
                               (bits & 8) != 0};
            out.push_back({toggles_label(t), apply_toggles(base, t)});
          }
        } else {
          ComponentToggles t = parse_components(v);
          out.push_back({toggles_label(t), apply_toggles(base, t)});
        }
        break;
      }
      case SweepAxis::backbone: {
        RunConfig cfg = base;
        cfg.segmenter.variant = v;
        cfg.validate();
        out.push_back({v, std::move(cfg)});
        break;
      }
      case SweepAxis::semantic_model: {
        RunConfig cfg = base;
        cfg.semantic.model = v;
        cfg.validate();
        out.push_back({v, std::move(cfg)});
        break;
      }
    }
  }
  return out;
}

std::vector<EvalReport> run_sweep(const std::vector<AnnotatedSample>& samples,
                                  const RunConfig& base, SweepAxis axis,
                                  const std::vector<std::string>& values,
                                  const CounterFactory& factory,
                                  const std::string& dataset_name) {
  auto variants = expand_axis(base, axis, values);
  std::vector<EvalReport> reports;
  reports.reserve(variants.size());
  for (const auto& var : variants) {
    reports.push_back(run_eval(samples, var.cfg, factory, dataset_name));
  }
  return reports;
}

std::string sweep_summary(const std::vector<SweepVariant>& variants,
                          const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  os << "value\tmae\trmse\n";
  for (size_t i = 0; i < reports.size(); ++i) {
    os << (i < variants.size() ? variants[i].label : "?") << "\t" << reports[i].mae << "\t"
       << reports[i].rmse << "\n";
  }
  return os.str();
}

}  // namespace maskcount::eval
