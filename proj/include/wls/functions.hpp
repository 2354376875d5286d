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

#include <cmath>
#include <charconv>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wls/lsq.hpp"
#include "wls/measure.hpp"

namespace wls {

/// Thrown for unknown or malformed target names.
class target_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A member of V_m with the given coefficients in index-set order.
inline Function polynomial_in_space(const ApproximationSpace& space,
                                    std::vector<double> coefficients) {
  if (coefficients.size() > space.size()) {
    throw target_error("inVm: " + std::to_string(coefficients.size()) +
                       " coefficients for a space of size " + std::to_string(space.size()));
  }
  coefficients.resize(space.size(), 0.0);
  return [space, coefficients](std::span<const double> x) {
    const std::vector<double> values = eval_tensor_basis(space, x);
    double v = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) v += coefficients[j] * values[j];
    return v;
  };
}

namespace detail {

inline std::vector<double> parse_coefficients(std::string_view text) {
  std::vector<double> out;
  while (!text.empty()) {
    const std::size_t comma = text.find(',');
    const std::string item(text.substr(0, comma));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw target_error("inVm: bad coefficient '" + item + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (out.empty()) throw target_error("inVm: no coefficients");
  return out;
}

}  // namespace detail

/// Built-in targets: zero, one, exp (exp of the coordinate sum),
/// runge (1 / (1 + 25 |x|^2)), and inVm:c0,c1,... (a member of V_m).
inline Function make_target(std::string_view name, const ApproximationSpace& space) {
  if (name == "zero") return [](std::span<const double>) { return 0.0; };
  if (name == "one") return [](std::span<const double>) { return 1.0; };
  if (name == "exp") {
    return [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += v;
      return std::exp(s);
    };
  }
  if (name == "runge") {
    return [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += v * v;
      return 1.0 / (1.0 + 25.0 * s);
    };
  }
  constexpr std::string_view kInVm = "inVm:";
  if (name.starts_with(kInVm)) {
    return polynomial_in_space(space, detail::parse_coefficients(name.substr(kInVm.size())));
  }
  throw target_error("unknown target function: " + std::string(name));
}

}  // namespace wls
