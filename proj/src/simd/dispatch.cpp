// Copyright 2026 The SPM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "spm/simd/kernels.hpp"

namespace spm::simd {

#ifdef SPM_HAVE_AVX2_KERNELS
const KernelTable& avx2_kernel_table();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(SPM_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  const char* env = std::getenv("SPM_SIMD");
  if (env != nullptr) {
    const std::string want(env);
    if (want == "scalar") return &scalar_kernels();
    if (want == "avx2" && avx2_kernels() == nullptr) {
      throw std::runtime_error("SPM_SIMD=avx2 requested but AVX2 kernels are unavailable");
    }
  }
  const KernelTable* avx2 = avx2_kernels();
  return avx2 != nullptr ? avx2 : &scalar_kernels();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

const KernelTable* avx2_kernels() {
#ifdef SPM_HAVE_AVX2_KERNELS
  static const bool ok = cpu_has_avx2();
  return ok ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

bool isa_supported(Isa isa) { return isa == Isa::kScalar || avx2_kernels() != nullptr; }

const KernelTable& active_kernels() { return *active_slot().load(std::memory_order_acquire); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument("set_active_isa: " + std::string(isa_name(isa)) + " not supported");
  }
  active_slot().store(isa == Isa::kScalar ? &scalar_kernels() : avx2_kernels(),
                      std::memory_order_release);
}

std::string_view isa_name(Isa isa) { return isa == Isa::kScalar ? "scalar" : "avx2"; }

}  // namespace spm::simd
