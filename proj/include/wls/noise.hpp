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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wls/lsq.hpp"
#include "wls/random.hpp"
#include "wls/sampler.hpp"

namespace wls {

/// Additive observation noise beta = h(x) + eta.
struct NoiseModel {
  enum class Kind { none, bounded_uniform, gaussian };
  Kind kind = Kind::none;
  double scale = 0.0;  // amplitude a for bounded_uniform, sigma for gaussian
  Function bias;       // h; empty means h == 0

  static NoiseModel none() { return {}; }
  static NoiseModel bounded_uniform(double amplitude, Function bias = {}) {
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
      throw std::invalid_argument("bounded_uniform amplitude must be finite and >= 0");
    }
    return {Kind::bounded_uniform, amplitude, std::move(bias)};
  }
  static NoiseModel gaussian(double sigma, Function bias = {}) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
      throw std::invalid_argument("gaussian sigma must be finite and >= 0");
    }
    return {Kind::gaussian, sigma, std::move(bias)};
  }

  /// sup_x E(|eta|^2 | x).
  double variance() const {
    switch (kind) {
      case Kind::none: return 0.0;
      case Kind::bounded_uniform: return scale * scale / 3.0;
      case Kind::gaussian: return scale * scale;
    }
    return 0.0;
  }
};

inline std::string_view to_string(NoiseModel::Kind k) {
  switch (k) {
    case NoiseModel::Kind::none: return "none";
    case NoiseModel::Kind::bounded_uniform: return "bounded_uniform";
    case NoiseModel::Kind::gaussian: return "gaussian";
  }
  return "";
}

inline NoiseModel::Kind noise_kind_from_name(std::string_view name) {
  if (name == "none") return NoiseModel::Kind::none;
  if (name == "bounded_uniform" || name == "uniform") return NoiseModel::Kind::bounded_uniform;
  if (name == "gaussian" || name == "normal") return NoiseModel::Kind::gaussian;
  throw std::invalid_argument("unknown noise model: " + std::string(name));
}

/// eta for sample index i. Independent of x and keyed by (seed, i).
inline double noise_draw(const NoiseModel& model, std::uint64_t seed, std::size_t i) {
  if (model.kind == NoiseModel::Kind::none || model.scale == 0.0) return 0.0;
  CounterStream stream(seed, 0x6e6f697365ULL, i);
  if (model.kind == NoiseModel::Kind::bounded_uniform) {
    return model.scale * (2.0 * stream.uniform() - 1.0);
  }
  return model.scale * stream.normal();
}

/// y_i = u(x_i) + h(x_i) + eta_i.
inline std::vector<double> observe(const Function& u, const WeightedSample& sample,
                                   const NoiseModel& model, std::uint64_t seed) {
  std::vector<double> y(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto x = sample.point(i);
    double v = u(x);
    if (model.bias) v += model.bias(x);
    y[i] = v + noise_draw(model, seed, i);
  }
  return y;
}

/// A.s. bound D on |beta| when both parts are bounded: an estimate of
/// ||h||_inf from 1e5 draws of rho, plus the amplitude. Empty for gaussian
/// noise (unbounded) or when h is unbounded on an unbounded domain.
inline std::optional<double> noise_bound(const NoiseModel& model,
                                         const ApproximationSpace& space,
                                         std::uint64_t seed = 0,
                                         std::size_t scan = 100000) {
  if (model.kind == NoiseModel::Kind::gaussian && model.scale > 0.0) return std::nullopt;
  double h_sup = 0.0;
  if (model.bias) {
    if (!space.all_bounded()) return std::nullopt;
    const WeightedSample pts = sample_standard(space, scan, seed);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      h_sup = std::max(h_sup, std::abs(model.bias(pts.point(i))));
    }
  }
  const double eta = model.kind == NoiseModel::Kind::bounded_uniform ? model.scale : 0.0;
  return h_sup + eta;
}

/// K-bar_{m,w} = integral of k_{m,w} = w k_m against rho. Equals m for the
/// optimal weight; for unit weights it is also m (orthonormality).
inline double mean_weighted_christoffel(const ApproximationSpace& space,
                                        const std::function<double(std::span<const double>)>& w,
                                        std::size_t points_per_dim = 0) {
  std::vector<std::size_t> pts = default_quadrature_points(space, 40);
  if (points_per_dim > 0) std::fill(pts.begin(), pts.end(), points_per_dim);
  double sum = 0.0;
  for_each_tensor_node(space.families(), pts, [&](std::span<const double> x, double wt) {
    sum += wt * w(x) * christoffel(space, x);
  });
  return sum;
}

}  // namespace wls
