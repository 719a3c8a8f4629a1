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

#include <cmath>

#include "spm/simd/kernels.hpp"

namespace spm::simd {
namespace {

void hidden_forward(const double* x, const double* w1, const double* b1, double* h,
                    std::size_t hidden) {
  for (std::size_t j = 0; j < hidden; ++j) {
    double a = b1[j];
    for (std::size_t i = 0; i < kInputs; ++i) a += x[i] * w1[i * hidden + j];
    h[j] = std::tanh(a);
  }
}

void output_forward(const double* h, const double* w2, const double* b2, double* y,
                    std::size_t hidden) {
  for (std::size_t k = 0; k < kOutputs; ++k) {
    double a = 0.0;
    const double* row = w2 + k * hidden;
    for (std::size_t j = 0; j < hidden; ++j) a += h[j] * row[j];
    y[k] = b2[k] + a;
  }
}

void hidden_backward(const double* x, const double* h, const double* dy, const double* w2,
                     double* gw1, double* gb1, double* gw2, std::size_t hidden) {
  for (std::size_t j = 0; j < hidden; ++j) {
    double g = 0.0;
    for (std::size_t k = 0; k < kOutputs; ++k) {
      g += dy[k] * w2[k * hidden + j];
      gw2[k * hidden + j] += dy[k] * h[j];
    }
    const double d = g * (1.0 - h[j] * h[j]);
    gb1[j] += d;
    for (std::size_t i = 0; i < kInputs; ++i) gw1[i * hidden + j] += x[i] * d;
  }
}

void adam_update(double* p, const double* g, double* m, double* v, std::size_t n, double lr,
                 double beta1, double beta2, double c1, double c2, double eps) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
    p[i] -= lr * (m[i] * c1) / (std::sqrt(v[i] * c2) + eps);
  }
}

void tanh_inplace(double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = std::tanh(x[i]);
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::kScalar, hidden_forward, output_forward, hidden_backward,
                                 adam_update, tanh_inplace};
  return table;
}

}  // namespace spm::simd
