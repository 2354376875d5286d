// Copyright 2026 The wls Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace wls {

/// A point lies outside the support of the measure it is evaluated against.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation needs a bounded orthonormal system (rejection sampling, sup norms).
class unbounded_family_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input: mismatched dimensions, non-symmetric matrices, bad lengths.
class structural_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerically built object (e.g. an inverse-CDF table) failed its checks.
class construction_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejection sampling exceeded its safety cap on proposal rounds.
class sampling_anomaly : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wls
