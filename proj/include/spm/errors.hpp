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

// Exception types raised by the toolkit. Every error the modules can report
// derives from spm::Error so callers (the CLI in particular) can map them to
// exit codes.

#pragma once

#include <stdexcept>
#include <string>

namespace spm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// mechanism kinematics
class NotUnitError : public Error { using Error::Error; };
class OutOfHemisphereError : public Error { using Error::Error; };
class UnreachableError : public Error { using Error::Error; };
class NoConvergenceError : public Error { using Error::Error; };
class SingularStepError : public Error { using Error::Error; };
class SingularJacobianError : public Error { using Error::Error; };

// plant
class PlantSingularError : public Error {
 public:
  PlantSingularError(const std::string& what, int profile_id, double time_s)
      : Error(what), profile_id_(profile_id), time_s_(time_s) {}
  int profile_id() const { return profile_id_; }
  double time_s() const { return time_s_; }

 private:
  int profile_id_;
  double time_s_;
};

// neural IK
class DivergedError : public Error { using Error::Error; };
class FormatError : public Error { using Error::Error; };
class VersionError : public Error { using Error::Error; };

// configuration files
class ConfigError : public Error { using Error::Error; };

}  // namespace spm
