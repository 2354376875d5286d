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
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "wls/error.hpp"
#include "wls/linalg.hpp"
#include "wls/measure.hpp"
#include "wls/parallel.hpp"
#include "wls/quadrature.hpp"
#include "wls/sampler.hpp"

namespace wls {

using Function = std::function<double(std::span<const double>)>;

/// Normal equations G v = d of the weighted least-squares problem:
///   G_jk = (1/n) sum_i w_i L_j(x_i) L_k(x_i),  d_j = (1/n) sum_i w_i y_i L_j(x_i).
struct NormalSystem {
  Eigen::MatrixXd gram;
  Eigen::VectorXd rhs;
  std::size_t n = 0;
};

struct SpectralStats {
  double dist_identity = 0.0;  // ||G - I||_2
  double cond = 1.0;           // lambda_max / lambda_min, +inf if lambda_min <= 0
  double lambda_min = 1.0;
  double lambda_max = 1.0;
};

/// Spectral-norm threshold of the conditioned estimator and the matching
/// condition-number bound (||G - I|| <= 1/2 implies cond(G) <= 3).
inline constexpr double kDefaultSpectralThreshold = 0.5;
inline constexpr double kConditionThreshold = 3.0;

/// Eigenvalues below this fraction of lambda_max are treated as zero.
inline constexpr double kRankTolerance = 1e-12;
/// Cholesky is used when lambda_min exceeds this.
inline constexpr double kCholeskyThreshold = 1e-8;

namespace detail {

inline constexpr std::size_t kAssemblyBlock = 2048;

// Rows sqrt(w_i) L(x_i) for sample indices [begin, end).
inline Eigen::MatrixXd weighted_design_block(const ApproximationSpace& space,
                                             const WeightedSample& sample,
                                             std::size_t begin, std::size_t end,
                                             TensorEvaluator& eval) {
  const auto m = static_cast<Eigen::Index>(space.size());
  Eigen::MatrixXd block(static_cast<Eigen::Index>(end - begin), m);
  for (std::size_t i = begin; i < end; ++i) {
    const auto values = eval(sample.point(i));
    const double sw = std::sqrt(sample.weights[i]);
    const auto row = static_cast<Eigen::Index>(i - begin);
    for (Eigen::Index j = 0; j < m; ++j) block(row, j) = sw * values[static_cast<std::size_t>(j)];
  }
  return block;
}

}  // namespace detail

/// Assembles G (and d when y is non-empty) in fixed blocks of 2048 samples
/// whose partial sums are reduced in block order, so the result is bit-identical
/// for any thread count. G is symmetric by construction.
inline NormalSystem assemble(const ApproximationSpace& space, const WeightedSample& sample,
                             std::span<const double> y, unsigned threads = 1) {
  if (sample.dimension != space.dimension()) {
    throw structural_error("assemble: sample dimension != space dimension");
  }
  const std::size_t n = sample.size();
  if (n == 0) throw structural_error("assemble: empty sample");
  const bool with_rhs = !y.empty();
  if (with_rhs && y.size() != n) {
    throw structural_error("assemble: y has length " + std::to_string(y.size()) +
                           ", expected " + std::to_string(n));
  }
  const auto m = static_cast<Eigen::Index>(space.size());
  const std::size_t blocks = (n + detail::kAssemblyBlock - 1) / detail::kAssemblyBlock;
  std::vector<Eigen::MatrixXd> partial_gram(blocks);
  std::vector<Eigen::VectorXd> partial_rhs(blocks);
  parallel_for(blocks, threads, [&](std::size_t b0, std::size_t b1) {
    TensorEvaluator eval(space);
    for (std::size_t b = b0; b < b1; ++b) {
      const std::size_t begin = b * detail::kAssemblyBlock;
      const std::size_t end = std::min(n, begin + detail::kAssemblyBlock);
      const Eigen::MatrixXd block = detail::weighted_design_block(space, sample, begin, end, eval);
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
      g.selfadjointView<Eigen::Lower>().rankUpdate(block.transpose());
      partial_gram[b] = std::move(g);
      if (with_rhs) {
        Eigen::VectorXd wy(static_cast<Eigen::Index>(end - begin));
        for (std::size_t i = begin; i < end; ++i) {
          wy[static_cast<Eigen::Index>(i - begin)] = std::sqrt(sample.weights[i]) * y[i];
        }
        partial_rhs[b] = block.transpose() * wy;
      }
    }
  });
  NormalSystem system;
  system.n = n;
  system.gram = Eigen::MatrixXd::Zero(m, m);
  system.rhs = Eigen::VectorXd::Zero(m);
  for (std::size_t b = 0; b < blocks; ++b) {
    system.gram += partial_gram[b];
    if (with_rhs) system.rhs += partial_rhs[b];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  system.gram *= inv_n;
  system.rhs *= inv_n;
  system.gram.triangularView<Eigen::StrictlyUpper>() =
      system.gram.transpose().triangularView<Eigen::StrictlyUpper>();
  return system;
}

/// Gramian only (observations ignored).
inline Eigen::MatrixXd assemble_gram(const ApproximationSpace& space,
                                     const WeightedSample& sample, unsigned threads = 1) {
  return assemble(space, sample, {}, threads).gram;
}

inline SpectralStats stats_from_eigenvalues(double lambda_min, double lambda_max) {
  SpectralStats s;
  s.lambda_min = lambda_min;
  s.lambda_max = lambda_max;
  s.dist_identity = std::max(std::abs(lambda_max - 1.0), std::abs(lambda_min - 1.0));
  s.cond = lambda_min > 0.0 ? lambda_max / lambda_min
                            : std::numeric_limits<double>::infinity();
  return s;
}

/// ||G - I||_2 and cond(G) from the Jacobi eigenvalues of a symmetric G.
inline SpectralStats spectral_stats(const Eigen::MatrixXd& gram) {
  if (!is_symmetric(gram)) throw structural_error("spectral_stats: matrix not symmetric");
  if (gram.rows() == 0) throw structural_error("spectral_stats: empty matrix");
  const SymmetricEigen eig = jacobi_eigen(gram, false);
  return stats_from_eigenvalues(eig.values[0], eig.values[eig.values.size() - 1]);
}

namespace detail {

inline Eigen::VectorXd pseudo_inverse_solve(const SymmetricEigen& eig,
                                            const Eigen::VectorXd& rhs) {
  const double lambda_max = eig.values[eig.values.size() - 1];
  Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
  if (lambda_max <= 0.0) return x;
  const double cutoff = kRankTolerance * lambda_max;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values[i] > cutoff) {
      x += eig.vectors.col(i) * (eig.vectors.col(i).dot(rhs) / eig.values[i]);
    }
  }
  return x;
}

}  // namespace detail

/// Minimal l2-norm solution of G v = d. Cholesky when lambda_min is safely
/// positive, otherwise the eigen-decomposition pseudo-inverse with eigenvalues
/// below 1e-12 lambda_max dropped. `lambda_min_hint` skips the eigenvalue pass
/// when the caller already knows the spectrum.
inline Eigen::VectorXd solve_min_norm(const NormalSystem& system,
                                      std::optional<double> lambda_min_hint = {}) {
  const Eigen::MatrixXd& g = system.gram;
  if (g.rows() != g.cols() || g.rows() != system.rhs.size()) {
    throw structural_error("solve_min_norm: inconsistent system");
  }
  if (lambda_min_hint && *lambda_min_hint > kCholeskyThreshold) {
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() == Eigen::Success) return llt.solve(system.rhs);
  }
  const SymmetricEigen eig = jacobi_eigen(g, true);
  if (eig.values[0] > kCholeskyThreshold) {
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() == Eigen::Success) return llt.solve(system.rhs);
  }
  return detail::pseudo_inverse_solve(eig, system.rhs);
}

/// Which of the three estimators to build from the least-squares solution.
struct Estimator {
  enum class Kind { plain, truncated, conditioned };
  Kind kind = Kind::plain;
  double tau = 0.0;                                 // truncated
  double threshold = kDefaultSpectralThreshold;     // conditioned

  static Estimator plain() { return {}; }
  static Estimator truncated(double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("truncated estimator needs tau > 0");
    return {Kind::truncated, tau, kDefaultSpectralThreshold};
  }
  static Estimator conditioned(double threshold = kDefaultSpectralThreshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
      throw std::invalid_argument("conditioned threshold must lie in (0, 1)");
    }
    return {Kind::conditioned, 0.0, threshold};
  }
};

inline std::string_view to_string(Estimator::Kind k) {
  switch (k) {
    case Estimator::Kind::plain: return "plain";
    case Estimator::Kind::truncated: return "truncated";
    case Estimator::Kind::conditioned: return "conditioned";
  }
  return "";
}

struct FitResult {
  Eigen::VectorXd coefficients;  // in index-set order
  Estimator estimator;
  SpectralStats stats;
  bool conditioned_zeroed = false;
};

/// T_tau(z) = sign(z) min(|z|, tau).
inline double truncate(double z, double tau) {
  return std::copysign(std::min(std::abs(z), tau), z);
}

/// Builds the chosen estimator. Truncation is deferred to evaluate(); the
/// conditioned estimator returns the zero function when ||G - I|| > threshold.
inline FitResult fit(const ApproximationSpace& space, const WeightedSample& sample,
                     std::span<const double> y, Estimator estimator = Estimator::plain(),
                     unsigned threads = 1) {
  if (estimator.kind == Estimator::Kind::truncated && !(estimator.tau > 0.0)) {
    throw std::invalid_argument("truncated estimator needs tau > 0");
  }
  if (y.size() != sample.size()) {
    throw structural_error("fit: y has length " + std::to_string(y.size()) +
                           ", expected " + std::to_string(sample.size()));
  }
  const NormalSystem system = assemble(space, sample, y, threads);
  FitResult result;
  result.estimator = estimator;
  result.stats = spectral_stats(system.gram);
  if (estimator.kind == Estimator::Kind::conditioned &&
      result.stats.dist_identity > estimator.threshold) {
    result.coefficients = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.size()));
    result.conditioned_zeroed = true;
    return result;
  }
  result.coefficients = solve_min_norm(system, result.stats.lambda_min);
  return result;
}

/// sum_nu c_nu L_nu(x), truncated when the estimator asks for it.
inline double evaluate(const FitResult& fit, const ApproximationSpace& space,
                       std::span<const double> x) {
  if (static_cast<std::size_t>(fit.coefficients.size()) != space.size()) {
    throw structural_error("evaluate: coefficient count != space size");
  }
  const std::vector<double> basis = eval_tensor_basis(space, x);
  double v = 0.0;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    v += fit.coefficients[static_cast<Eigen::Index>(j)] * basis[j];
  }
  if (fit.estimator.kind == Estimator::Kind::truncated) v = truncate(v, fit.estimator.tau);
  return v;
}

/// How L^2(rho) norms are approximated.
struct ErrorMethod {
  enum class Kind { tensor_quadrature, monte_carlo };
  Kind kind = Kind::tensor_quadrature;
  std::size_t points_per_dim = 0;  // 0: lambda_i + 1 + 40
  std::size_t samples = 100000;
  std::uint64_t seed = 0;

  static ErrorMethod quadrature(std::size_t points_per_dim = 0) {
    return {Kind::tensor_quadrature, points_per_dim, 0, 0};
  }
  static ErrorMethod monte_carlo(std::size_t samples, std::uint64_t seed) {
    return {Kind::monte_carlo, 0, samples, seed};
  }
};

namespace detail {

// Integrates f against rho with the chosen method.
template <typename F>
double integrate_rho(const ApproximationSpace& space, const ErrorMethod& method, F&& f) {
  double sum = 0.0;
  if (method.kind == ErrorMethod::Kind::tensor_quadrature) {
    std::vector<std::size_t> pts = default_quadrature_points(space, 40);
    if (method.points_per_dim > 0) std::fill(pts.begin(), pts.end(), method.points_per_dim);
    for_each_tensor_node(space.families(), pts,
                         [&](std::span<const double> x, double w) { sum += w * f(x); });
    return sum;
  }
  const WeightedSample pts = sample_standard(space, method.samples, method.seed);
  for (std::size_t i = 0; i < pts.size(); ++i) sum += f(pts.point(i));
  return sum / static_cast<double>(pts.size());
}

}  // namespace detail

/// ||u - u~||_{L^2(rho)} for a fitted estimator.
inline double l2_error(const ApproximationSpace& space, const FitResult& fitted,
                       const Function& u, const ErrorMethod& method = {}) {
  const double sq = detail::integrate_rho(space, method, [&](std::span<const double> x) {
    const double e = u(x) - evaluate(fitted, space, x);
    return e * e;
  });
  return std::sqrt(std::max(sq, 0.0));
}

/// ||u||_{L^2(rho)}.
inline double l2_norm(const ApproximationSpace& space, const Function& u,
                      const ErrorMethod& method = {}) {
  const double sq = detail::integrate_rho(space, method, [&](std::span<const double> x) {
    const double v = u(x);
    return v * v;
  });
  return std::sqrt(std::max(sq, 0.0));
}

/// Coefficients <u, L_nu> of the L^2(rho) projection P_m u.
inline Eigen::VectorXd projection_coefficients(const ApproximationSpace& space,
                                               const Function& u,
                                               const ErrorMethod& method = {}) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.size()));
  TensorEvaluator eval(space);
  if (method.kind == ErrorMethod::Kind::tensor_quadrature) {
    std::vector<std::size_t> pts = default_quadrature_points(space, 40);
    if (method.points_per_dim > 0) std::fill(pts.begin(), pts.end(), method.points_per_dim);
    for_each_tensor_node(space.families(), pts, [&](std::span<const double> x, double w) {
      const double ux = u(x);
      const auto values = eval(x);
      for (std::size_t j = 0; j < values.size(); ++j) {
        c[static_cast<Eigen::Index>(j)] += w * ux * values[j];
      }
    });
    return c;
  }
  const WeightedSample pts = sample_standard(space, method.samples, method.seed);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double ux = u(pts.point(i));
    const auto values = eval(pts.point(i));
    for (std::size_t j = 0; j < values.size(); ++j) c[static_cast<Eigen::Index>(j)] += ux * values[j];
  }
  return c / static_cast<double>(pts.size());
}

/// e_m(u) = ||u - P_m u||, with P_m u from projection_coefficients.
inline double best_approx_error(const ApproximationSpace& space, const Function& u,
                                const ErrorMethod& method = {}) {
  FitResult projection;
  projection.coefficients = projection_coefficients(space, u, method);
  return l2_error(space, projection, u, method);
}

}  // namespace wls
