// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#include "maskcount/common.hpp"
#include "kernels_impl.hpp"

namespace maskcount::kernels {

namespace {

Isa detect() {
#if defined(MASKCOUNT_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2")) return Isa::avx2;
#endif
  return Isa::scalar;
}

Isa g_isa = detect();

}  // namespace

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(MASKCOUNT_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table_for(Isa isa) {
#if defined(MASKCOUNT_HAVE_AVX2)
  if (isa == Isa::avx2) return avx2_table();
#endif
  (void)isa;
  return scalar_table();
}

const KernelTable& active() { return table_for(g_isa); }

Isa active_isa() { return g_isa; }

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void select(const std::string& name) {
  if (name == "auto") {
    g_isa = detect();
    return;
  }
  Isa want;
  if (name == "scalar") {
    want = Isa::scalar;
  } else if (name == "avx2") {
    want = Isa::avx2;
  } else {
    fail(errc::invalid_parameter, "unknown kernel isa '" + name + "' (scalar|avx2|auto)");
  }
  if (!supported(want)) {
    fail(errc::invalid_parameter, std::string("kernel isa not supported on this host: ") + name);
  }
  g_isa = want;
}

}  // namespace maskcount::kernels
