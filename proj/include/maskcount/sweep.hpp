// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "maskcount/config.hpp"
#include "maskcount/dataset.hpp"
#include "maskcount/metrics.hpp"

namespace maskcount::eval {

// Per-worker counting engine; run_eval constructs one per worker thread so
// backend instances are never shared across threads.
class SampleCounter {
 public:
  virtual ~SampleCounter() = default;
  virtual double count(const AnnotatedSample& sample) = 0;
};

using CounterFactory = std::function<std::unique_ptr<SampleCounter>(const RunConfig&)>;

// Order-preserving parallel evaluation. When resume_path is set, finished
// sample ids are journaled there and skipped on rerun.
EvalReport run_eval(const std::vector<AnnotatedSample>& samples, const RunConfig& cfg,
                    const CounterFactory& factory, const std::string& dataset_name,
                    const std::string& resume_path = "");

enum class SweepAxis { theta, delta, tpu_rounds, components, backbone, semantic_model };

SweepAxis parse_axis(const std::string& name);

struct SweepVariant {
  std::string label;
  RunConfig cfg;
};

// Expands axis values into config variants. The components axis accepts
// subset strings over {sp, sem, tpu, ms} joined by '+' ("-" or "none" for
// the all-off row, "all" for everything, "matrix" for all 16 combinations).
std::vector<SweepVariant> expand_axis(const RunConfig& base, SweepAxis axis,
                                      const std::vector<std::string>& values);

std::vector<EvalReport> run_sweep(const std::vector<AnnotatedSample>& samples,
                                  const RunConfig& base, SweepAxis axis,
                                  const std::vector<std::string>& values,
                                  const CounterFactory& factory,
                                  const std::string& dataset_name);

// Plain-text table: one row per report (label, MAE, RMSE).
std::string sweep_summary(const std::vector<SweepVariant>& variants,
                          const std::vector<EvalReport>& reports);

}  // namespace maskcount::eval
