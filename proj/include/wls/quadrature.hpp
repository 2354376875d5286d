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

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "wls/basis.hpp"
#include "wls/gauss.hpp"
#include "wls/measure.hpp"

namespace wls {

/// n-point Gauss rule for the probability measure rho of a family, from the
/// eigen-decomposition of its Jacobi matrix (Golub-Welsch).
inline GaussRule gauss_rule(const BasisFamily& family, std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_rule: n must be >= 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(n > 1 ? n - 1 : 0));
  for (std::size_t j = 1; j < n; ++j) {
    sub[static_cast<Eigen::Index>(j - 1)] = family.recurrence_coefficient(static_cast<int>(j));
  }
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 1.0;
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  // Weights from the Christoffel formula 1 / sum_{j<n} phi_j(x_i)^2, which is
  // more accurate than squared eigenvector components for large nodes.
  std::vector<double> phi(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()[static_cast<Eigen::Index>(i)];
    eval_basis_unchecked(family, static_cast<int>(n) - 1, rule.nodes[i], phi.data());
    double k = 0.0;
    for (double v : phi) k += v * v;
    rule.weights[i] = 1.0 / k;
    total += rule.weights[i];
  }
  for (double& w : rule.weights) w /= total;
  return rule;
}

/// Product rule over X = X_1 x ... x X_d with `points_per_dim[i]` nodes in
/// coordinate i. Calls f(x, weight) for each tensor node.
template <typename F>
void for_each_tensor_node(const std::vector<BasisFamily>& families,
                          const std::vector<std::size_t>& points_per_dim, F&& f) {
  const std::size_t d = families.size();
  std::vector<GaussRule> rules;
  rules.reserve(d);
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) {
    rules.push_back(gauss_rule(families[i], points_per_dim[i]));
    total *= points_per_dim[i];
    if (total > 50'000'000) {
      throw std::invalid_argument("tensor quadrature too large; use Monte Carlo");
    }
  }
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d);
  for (std::size_t count = 0; count < total; ++count) {
    double w = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = rules[i].nodes[idx[i]];
      w *= rules[i].weights[idx[i]];
    }
    f(std::span<const double>(x), w);
    for (std::size_t i = 0; i < d; ++i) {
      if (++idx[i] < points_per_dim[i]) break;
      idx[i] = 0;
    }
  }
}

/// Nodes per coordinate that integrate products of two elements of V_m
/// exactly, padded for smooth non-polynomial integrands.
inline std::vector<std::size_t> default_quadrature_points(const ApproximationSpace& space,
                                                          std::size_t extra = 0) {
  std::vector<std::size_t> pts(space.dimension());
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    pts[i] = static_cast<std::size_t>(space.max_degree(i)) + 1 + extra;
  }
  return pts;
}

}  // namespace wls
