// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace maskcount::kernels::detail {

// sRGB gamma expansion for 8-bit inputs, shared by all kernel variants so
// the color conversion is identical regardless of ISA.
const std::array<float, 256>& srgb_linear_lut();

// D65 whitepoint-normalized XYZ rows for linear-RGB input.
inline constexpr float kXr = 0.4124564f / 0.950456f, kXg = 0.3575761f / 0.950456f,
                       kXb = 0.1804375f / 0.950456f;
inline constexpr float kYr = 0.2126729f, kYg = 0.7151522f, kYb = 0.0721750f;
inline constexpr float kZr = 0.0193339f / 1.088754f, kZg = 0.1191920f / 1.088754f,
                       kZb = 0.9503041f / 1.088754f;

inline constexpr float kLabEps = 216.0f / 24389.0f;   // (6/29)^3
inline constexpr float kLabKappa = 24389.0f / 27.0f;  // (29/3)^3

// Cube root for t in (0, ~1.1]: bit-hack seed + fixed Newton steps. The SIMD
// variants replicate this operation sequence exactly so results stay
// bit-identical across ISAs.
inline float cbrt_pos(float x) {
  uint32_t i = std::bit_cast<uint32_t>(x);
  i = (uint32_t)(((uint64_t)i * 0xAAAAAAABull) >> 33) + 0x2A514067u;  // i/3 + bias
  float y = std::bit_cast<float>(i);
  for (int k = 0; k < 4; ++k) {
    y = 0.33333334f * (2.0f * y + x / (y * y));
  }
  return y;
}

// Piecewise CIELAB f(); input is a whitepoint-normalized tristimulus value.
inline float lab_f(float t) {
  return t > kLabEps ? cbrt_pos(t) : (kLabKappa * t + 16.0f) / 116.0f;
}

}  // namespace maskcount::kernels::detail
