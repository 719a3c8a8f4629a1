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

#include "spm/dataset_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "spm/errors.hpp"

namespace spm {
namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  out << buf;
}

double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw FormatError("dataset line " + std::to_string(line) + ": bad number '" + s + "'");
}

}  // namespace

void write_dataset_csv(std::ostream& out, const Dataset& ds) {
  out << kDatasetCsvHeader << '\n';
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const Sample& s = ds.samples[i];
    put(out, s.t);
    for (double c : s.q01.wxyz()) {
      out << ',';
      put(out, c);
    }
    out << ',';
    put(out, s.theta1);
    out << ',';
    put(out, s.theta2);
    out << ',' << s.profile_id << ',' << (ds.split[i] == Split::kTest ? "test" : "train") << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("dataset: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kDatasetCsvHeader) throw FormatError("dataset: unexpected header '" + line + "'");
  Dataset ds;
  std::size_t lineno = 1;
  std::vector<std::string> f;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    f.clear();
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 9) {
      throw FormatError("dataset line " + std::to_string(lineno) + ": expected 9 fields");
    }
    Sample s;
    s.t = parse_double(f[0], lineno);
    try {
      s.q01 = UnitQuaternion(parse_double(f[1], lineno), parse_double(f[2], lineno),
                             parse_double(f[3], lineno), parse_double(f[4], lineno));
    } catch (const std::invalid_argument&) {
      throw FormatError("dataset line " + std::to_string(lineno) + ": invalid quaternion");
    }
    s.theta1 = parse_double(f[5], lineno);
    s.theta2 = parse_double(f[6], lineno);
    try {
      std::size_t used = 0;
      s.profile_id = std::stoi(f[7], &used);
      if (used != f[7].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw FormatError("dataset line " + std::to_string(lineno) + ": bad profile id");
    }
    Split sp;
    if (f[8] == "train") {
      sp = Split::kTrain;
    } else if (f[8] == "test") {
      sp = Split::kTest;
    } else {
      throw FormatError("dataset line " + std::to_string(lineno) + ": unknown split '" + f[8] + "'");
    }
    ds.samples.push_back(s);
    ds.split.push_back(sp);
  }
  return ds;
}

void save_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_dataset_csv(out, ds);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open dataset " + path);
  return read_dataset_csv(in);
}

}  // namespace spm
