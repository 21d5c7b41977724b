// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "maskcount/kernels.hpp"

namespace maskcount::kernels {

const KernelTable& scalar_table();

#if defined(MASKCOUNT_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

// Scalar entry points, reused by the SIMD variants for loop tails.
namespace scalar {
void rgb8_to_lab(const uint8_t* rgb, size_t n, float* lp, float* ap, float* bp);
void cluster_row_assign(const float* l, const float* a, const float* b, int x0, int n,
                        float seed_l, float seed_a, float seed_b, float seed_x, float seed_y,
                        float row_y, float spatial_w, int32_t label, float* best_dist,
                        int32_t* best_label);
uint64_t popcount_words(const uint64_t* w, size_t n);
uint64_t popcount_and(const uint64_t* a, const uint64_t* b, size_t n);
uint64_t popcount_or(const uint64_t* a, const uint64_t* b, size_t n);
double dot_f64(const double* a, const double* b, size_t n);
void axpy_f32_f64(double* acc, const float* x, double w, size_t n);
}  // namespace scalar

}  // namespace maskcount::kernels
