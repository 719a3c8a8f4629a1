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

// Shared helpers for the unit tests.

#pragma once

#include <cmath>
#include <random>

#include "spm/rotation.hpp"

namespace spm::test {

inline UnitQuaternion random_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return {n(rng), n(rng), n(rng), n(rng)};
}

/// Equal up to the double cover.
inline bool quat_close(const UnitQuaternion& a, const UnitQuaternion& b, double tol) {
  double same = 0.0, flip = 0.0;
  const auto x = a.wxyz(), y = b.wxyz();
  for (int i = 0; i < 4; ++i) {
    same = std::max(same, std::abs(x[i] - y[i]));
    flip = std::max(flip, std::abs(x[i] + y[i]));
  }
  return std::min(same, flip) <= tol;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace spm::test
