// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace maskcount::kernels {

// Data-parallel inner loops used by the clustering, masking and matching
// stages. Every entry has a scalar reference implementation and may have
// SIMD variants; the active table is chosen once at startup (or forced via
// select()). Lanewise kernels are bit-exact across variants; reductions
// (dot) may differ in summation order and are tolerance-tested.
struct KernelTable {
  // sRGB (8-bit, interleaved) -> CIELAB planes.
  void (*rgb8_to_lab)(const uint8_t* rgb, size_t n, float* l, float* a, float* b);

  // One row segment of the clustering assignment step. Pointers are offset
  // to x0 already. Updates best_dist/best_label where this seed wins.
  void (*cluster_row_assign)(const float* l, const float* a, const float* b, int x0, int n,
                             float seed_l, float seed_a, float seed_b, float seed_x, float seed_y,
                             float row_y, float spatial_w, int32_t label, float* best_dist,
                             int32_t* best_label);

  uint64_t (*popcount_words)(const uint64_t* w, size_t n);
  uint64_t (*popcount_and)(const uint64_t* a, const uint64_t* b, size_t n);
  uint64_t (*popcount_or)(const uint64_t* a, const uint64_t* b, size_t n);

  double (*dot_f64)(const double* a, const double* b, size_t n);
  // acc[i] += w * x[i], float input widened to double.
  void (*axpy_f32_f64)(double* acc, const float* x, double w, size_t n);
};

enum class Isa { scalar, avx2 };

const KernelTable& active();
Isa active_isa();
const char* isa_name(Isa);

// Forces a variant; throws if unsupported on this host. "auto" re-detects.
void select(const std::string& name);
bool supported(Isa);

const KernelTable& table_for(Isa);  // for equivalence tests

}  // namespace maskcount::kernels
