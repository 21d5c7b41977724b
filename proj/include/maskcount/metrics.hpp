// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "maskcount/config.hpp"

namespace maskcount::eval {

// (MAE, RMSE) over (ground truth, prediction) pairs; n >= 1.
std::pair<double, double> compute_metrics(std::span<const std::pair<double, double>> pairs);

struct SampleResult {
  std::string id;
  double y = 0.0;
  double yhat = 0.0;
  double abs_err = 0.0;
  double wall_ms = 0.0;
};

// One evaluation run. The serialized body (config, dataset, samples, metrics)
// is deterministic for a fixed config/corpus/backend; wall-clock numbers and
// the timestamp live in a separate "timing" section excluded from golden
// comparisons.
struct EvalReport {
  std::string dataset;
  std::string config_json;  // effective config snapshot
  std::vector<std::string> exemplar_ids;
  std::vector<SampleResult> per_sample;
  double mae = 0.0;
  double rmse = 0.0;
  double runtime_s = 0.0;
  std::string timestamp;

  void finalize();  // recompute mae/rmse from per_sample
  std::string to_json_text() const;
  std::string canonical_body() const;  // timing stripped, for golden tests
  void save(const std::string& path) const;
};

}  // namespace maskcount::eval
