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

// Inner loops of the single-hidden-layer IK network.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The variant is picked once at startup from CPUID and can
// be forced with the SPM_SIMD environment variable ("scalar" or "avx2") or
// set_active_isa(). Results agree between variants to rounding, not bitwise:
// the AVX2 reductions use a different summation order and a polynomial tanh.
// Within one variant every kernel is deterministic.
//
// Layouts (H = hidden units, all row-major):
//   w1: 4 x H   input -> hidden, w1[i * H + j]
//   w2: 2 x H   hidden -> output, w2[k * H + j]

#pragma once

#include <cstddef>
#include <string_view>

namespace spm::simd {

inline constexpr std::size_t kInputs = 4;
inline constexpr std::size_t kOutputs = 2;

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;

  /// h[j] = tanh(b1[j] + sum_i x[i] * w1[i*H + j])
  void (*hidden_forward)(const double* x, const double* w1, const double* b1, double* h,
                         std::size_t hidden);

  /// y[k] = b2[k] + sum_j h[j] * w2[k*H + j]
  void (*output_forward)(const double* h, const double* w2, const double* b2, double* y,
                         std::size_t hidden);

  /// Accumulates one sample's gradient given dL/dy:
  ///   gw2[k*H+j] += dy[k] h[j]
  ///   d_j = (sum_k dy[k] w2[k*H+j]) (1 - h[j]^2)
  ///   gb1[j] += d_j,   gw1[i*H+j] += x[i] d_j
  void (*hidden_backward)(const double* x, const double* h, const double* dy, const double* w2,
                          double* gw1, double* gb1, double* gw2, std::size_t hidden);

  /// Bias-corrected Adam step over n parameters:
  ///   m = b1 m + (1-b1) g;  v = b2 v + (1-b2) g^2
  ///   p -= lr * (m * c1) / (sqrt(v * c2) + eps)
  /// with c1 = 1/(1-b1^t), c2 = 1/(1-b2^t).
  void (*adam_update)(double* p, const double* g, double* m, double* v, std::size_t n, double lr,
                      double beta1, double beta2, double c1, double c2, double eps);

  /// In-place tanh.
  void (*tanh_inplace)(double* x, std::size_t n);
};

const KernelTable& scalar_kernels();

/// Null when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

bool isa_supported(Isa isa);

/// Kernels used by the rest of the library.
const KernelTable& active_kernels();

/// Throws std::invalid_argument when `isa` is not supported here.
void set_active_isa(Isa isa);

std::string_view isa_name(Isa isa);

}  // namespace spm::simd
