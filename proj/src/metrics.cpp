// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#include "maskcount/metrics.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "maskcount/common.hpp"

namespace maskcount::eval {

using json = nlohmann::ordered_json;

std::pair<double, double> compute_metrics(std::span<const std::pair<double, double>> pairs) {
  if (pairs.empty()) fail(errc::invalid_parameter, "compute_metrics: no samples");
  double ae = 0.0, se = 0.0;
  for (const auto& [y, yhat] : pairs) {
    double e = y - yhat;
    ae += std::abs(e);
    se += e * e;
  }
  double n = (double)pairs.size();
  return {ae / n, std::sqrt(se / n)};
}

void EvalReport::finalize() {
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(per_sample.size());
  for (auto& s : per_sample) {
    s.abs_err = std::abs(s.y - s.yhat);
    pairs.emplace_back(s.y, s.yhat);
  }
  auto [m, r] = compute_metrics(pairs);
  mae = m;
  rmse = r;
}

namespace {

json body_json(const EvalReport& rep) {
  json j;
  j["dataset"] = rep.dataset;
  j["config"] = json::parse(rep.config_json.empty() ? "{}" : rep.config_json);
  if (!rep.exemplar_ids.empty()) j["exemplar_ids"] = rep.exemplar_ids;
  j["per_sample"] = json::array();
  for (const auto& s : rep.per_sample) {
    json e;
    e["id"] = s.id;
    e["y"] = s.y;
    e["yhat"] = s.yhat;
    e["abs_err"] = s.abs_err;
    j["per_sample"].push_back(std::move(e));
  }
  j["mae"] = rep.mae;
  j["rmse"] = rep.rmse;
  return j;
}

}  // namespace

std::string EvalReport::canonical_body() const { return body_json(*this).dump(2); }

std::string EvalReport::to_json_text() const {
  json j = body_json(*this);
  json timing;
  timing["runtime_s"] = runtime_s;
  timing["timestamp"] = timestamp;
  json per_ms = json::array();
  for (const auto& s : per_sample) per_ms.push_back(s.wall_ms);
  timing["per_sample_ms"] = std::move(per_ms);
  j["timing"] = std::move(timing);
  return j.dump(2);
}

void EvalReport::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) fail(errc::io, "cannot write report: " + path);
  f << to_json_text() << "\n";
  if (!f) fail(errc::io, "short write: " + path);
}

}  // namespace maskcount::eval
