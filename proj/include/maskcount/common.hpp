// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace maskcount {

// Error classes map 1:1 onto CLI exit codes; keep the numbering stable.
enum class errc : int {
  ok = 0,
  generic = 1,
  usage = 2,
  ingestion = 3,
  backend_load = 4,
  reference_failure = 5,
  invalid_parameter = 6,
  io = 7,
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  errc code() const noexcept { return code_; }
  int exit_code() const noexcept { return static_cast<int>(code_); }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc c, const std::string& msg) { throw Error(c, msg); }

constexpr uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic RNG with a fixed cross-platform stream (the standard library
// distributions are implementation-defined, which would break report goldens).
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Lemire's bounded rejection method.
  uint32_t bounded(uint32_t n) {
    if (n == 0) return 0;
    uint64_t m = (uint64_t)(uint32_t)next() * n;
    uint32_t lo = (uint32_t)m;
    if (lo < n) {
      uint32_t t = (0u - n) % n;
      while (lo < t) {
        m = (uint64_t)(uint32_t)next() * n;
        lo = (uint32_t)m;
      }
    }
    return (uint32_t)(m >> 32);
  }

  double unit() { return (double)(next() >> 11) * 0x1.0p-53; }

  double range(double a, double b) { return a + (b - a) * unit(); }

  // inclusive on both ends
  int irange(int a, int b) { return a + (int)bounded((uint32_t)(b - a + 1)); }

 private:
  uint64_t state_;
};

}  // namespace maskcount
