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

// Dataset CSV:
//   t_s,q01_w,q01_x,q01_y,q01_z,theta1_rad,theta2_rad,profile_id,split
// with split "train" or "test" and floats at 9 significant digits.

#pragma once

#include <iosfwd>
#include <string>

#include "spm/plant.hpp"

namespace spm {

inline constexpr const char* kDatasetCsvHeader =
    "t_s,q01_w,q01_x,q01_y,q01_z,theta1_rad,theta2_rad,profile_id,split";

void write_dataset_csv(std::ostream& out, const Dataset& ds);

/// Throws FormatError on a bad header, a malformed row or an unknown split.
Dataset read_dataset_csv(std::istream& in);

void save_dataset(const std::string& path, const Dataset& ds);
Dataset load_dataset(const std::string& path);

}  // namespace spm
