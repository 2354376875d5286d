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
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wls/basis.hpp"
#include "wls/error.hpp"
#include "wls/gauss.hpp"
#include "wls/measure.hpp"
#include "wls/parallel.hpp"
#include "wls/random.hpp"

namespace wls {

enum class SamplingMeasure { optimal, standard };

/// Univariate kernel used inside sequential conditional sampling. `automatic`
/// chooses rejection for bounded families and inverse transform for Gaussian,
/// coordinate by coordinate.
enum class SamplingMethod { rejection, inverse_transform, automatic };

/// How Phi(z) = u is solved when sampling by inverse transform.
enum class RootSolver { interpolant, bisection, newton };

inline std::string_view to_string(SamplingMeasure m) {
  return m == SamplingMeasure::optimal ? "optimal" : "standard";
}

inline std::string_view to_string(SamplingMethod m) {
  switch (m) {
    case SamplingMethod::rejection: return "RS";
    case SamplingMethod::inverse_transform: return "ITS";
    case SamplingMethod::automatic: return "auto";
  }
  return "";
}

inline SamplingMethod sampling_method_from_name(std::string_view name) {
  if (name == "RS" || name == "rs" || name == "rejection") return SamplingMethod::rejection;
  if (name == "ITS" || name == "its" || name == "inverse_transform") {
    return SamplingMethod::inverse_transform;
  }
  if (name == "auto" || name == "automatic") return SamplingMethod::automatic;
  throw std::invalid_argument("unknown sampling method: " + std::string(name));
}

inline RootSolver root_solver_from_name(std::string_view name) {
  if (name == "interpolant") return RootSolver::interpolant;
  if (name == "bisection") return RootSolver::bisection;
  if (name == "newton") return RootSolver::newton;
  throw std::invalid_argument("unknown root solver: " + std::string(name));
}

struct SampleMeta {
  SamplingMeasure measure = SamplingMeasure::optimal;
  std::uint64_t seed = 0;
  SamplingMethod method = SamplingMethod::automatic;
  std::string fingerprint;
};

/// n points in X (row-major, n x d) with their least-squares weights.
struct WeightedSample {
  std::size_t dimension = 0;
  std::vector<double> points;
  std::vector<double> weights;
  SampleMeta meta;

  std::size_t size() const { return weights.size(); }
  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * dimension, dimension};
  }
  std::span<double> point(std::size_t i) {
    return {points.data() + i * dimension, dimension};
  }
};

/// One draw from rho_i.
template <typename Stream>
double sample_reference(const BasisFamily& family, Stream& stream) {
  switch (family.kind()) {
    case FamilyKind::legendre_uniform:
      return 2.0 * stream.uniform() - 1.0;
    case FamilyKind::chebyshev_arcsine:
      return -std::cos(std::numbers::pi * stream.uniform());
    case FamilyKind::hermite_gaussian:
      return stream.normal();
  }
  return 0.0;
}

/// Envelope constant M_q = max_{k <= lambda_q} ||phi_k||_inf^2 for the proposal
/// Theta_q = rho_q.
inline double rejection_constant(const ConditionalMixture& mixture) {
  double m = 0.0;
  for (int k = 0; k <= mixture.max_degree(); ++k) {
    const double b = sup_norm_bound(mixture.family, k);
    m = std::max(m, b * b);
  }
  return m;
}

inline constexpr std::size_t kRejectionRoundCap = 1000000;

/// Exact draw from a bounded mixture by rejection from rho_q: accept z when
/// u < sum_k c_k phi_k(z)^2 / M_q. `rounds`, when given, receives the number of
/// proposals used.
template <typename Stream>
double sample_mixture_rejection(const ConditionalMixture& mixture, Stream& stream,
                                std::size_t* rounds = nullptr) {
  const double envelope = rejection_constant(mixture);
  std::vector<double> phi(mixture.coefficients.size());
  for (std::size_t round = 1; round <= kRejectionRoundCap; ++round) {
    const double z = sample_reference(mixture.family, stream);
    const double u = stream.uniform();
    eval_basis_unchecked(mixture.family, mixture.max_degree(), z, phi.data());
    double ratio = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k) {
      ratio += mixture.coefficients[k] * phi[k] * phi[k];
    }
    if (u * envelope < ratio) {
      if (rounds) *rounds = round;
      return z;
    }
  }
  throw sampling_anomaly("rejection sampling exceeded 1e6 proposal rounds");
}

inline double sample_mixture_rejection(const ConditionalMixture& mixture,
                                       std::uint64_t seed) {
  CounterStream stream(seed);
  return sample_mixture_rejection(mixture, stream);
}

/// Tables of P_k(t_i) for k <= max_degree at grid nodes t_i = t(s_i), with
/// s_i equispaced in the mapped variable. Prefix-independent: a mixture CDF at a
/// node is sum_k c_k P_k(t_i). Built once per (family, max_degree) by
/// accumulating 8-point Gauss-Legendre panel integrals.
class PrimitiveTable {
 public:
  static constexpr std::size_t kDefaultGridSize = 1025;

  PrimitiveTable(BasisFamily family, int max_degree,
                 std::size_t grid_size = kDefaultGridSize)
      : family_(family),
        max_degree_(max_degree),
        grid_size_(grid_size),
        support_(mapped_support(family, max_degree)) {
    if (grid_size_ < 2) throw std::invalid_argument("PrimitiveTable: grid_size < 2");
    if (max_degree_ < 0) throw std::invalid_argument("PrimitiveTable: max_degree < 0");
    step_ = (support_.hi - support_.lo) / static_cast<double>(grid_size_ - 1);
    const std::size_t width = stride();
    values_.assign(grid_size_ * width, 0.0);
    std::vector<double> phi(width);
    std::vector<double> panel(width);
    const GaussRule& rule = cached_gauss_legendre<kPanelOrder>();
    for (std::size_t i = 0; i + 1 < grid_size_; ++i) {
      const double a = node_s(i);
      const double b = node_s(i + 1);
      const double half = 0.5 * (b - a);
      const double mid = 0.5 * (a + b);
      std::fill(panel.begin(), panel.end(), 0.0);
      for (std::size_t g = 0; g < kPanelOrder; ++g) {
        const double s = mid + half * rule.nodes[g];
        eval_basis_unchecked(family_, max_degree_, mapped_to_point(family_, s),
                             phi.data());
        const double w = rule.weights[g] * half * mapped_density(family_, s);
        for (std::size_t k = 0; k < width; ++k) panel[k] += w * phi[k] * phi[k];
      }
      const double* prev = values_.data() + i * width;
      double* next = values_.data() + (i + 1) * width;
      for (std::size_t k = 0; k < width; ++k) next[k] = prev[k] + panel[k];
    }
  }

  const BasisFamily& family() const { return family_; }
  int max_degree() const { return max_degree_; }
  std::size_t grid_size() const { return grid_size_; }
  std::size_t stride() const { return static_cast<std::size_t>(max_degree_) + 1; }
  MappedSupport support() const { return support_; }

  double node_s(std::size_t i) const {
    return i + 1 == grid_size_ ? support_.hi
                               : support_.lo + step_ * static_cast<double>(i);
  }
  double node_t(std::size_t i) const { return mapped_to_point(family_, node_s(i)); }

  /// P_0..P_{max_degree} at node i.
  std::span<const double> primitives(std::size_t i) const {
    return {values_.data() + i * stride(), stride()};
  }

  /// sum_k c_k P_k(t_i); coefficients may be shorter than stride().
  double mixture_cdf(std::size_t i, std::span<const double> coefficients) const {
    const double* row = values_.data() + i * stride();
    double s = 0.0;
    for (std::size_t k = 0; k < coefficients.size(); ++k) s += coefficients[k] * row[k];
    return s;
  }

  static constexpr std::size_t kPanelOrder = 8;

 private:
  BasisFamily family_;
  int max_degree_;
  std::size_t grid_size_;
  MappedSupport support_;
  double step_ = 0.0;
  std::vector<double> values_;
};

/// Piecewise-linear interpolant of Phi^{-1} through (Phi(t_k), t_k).
struct InverseCdfInterpolant {
  std::size_t q = 1;
  std::vector<double> nodes;   // t_1 < ... < t_s
  std::vector<double> values;  // Phi(t_k), strictly increasing, last == 1

  double operator()(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw domain_error("inverse CDF: u not in (0, 1)");
    auto it = std::upper_bound(values.begin(), values.end(), u);
    if (it == values.begin()) return nodes.front();
    if (it == values.end()) return nodes.back();
    const auto hi = static_cast<std::size_t>(it - values.begin());
    const std::size_t lo = hi - 1;
    const double frac = (u - values[lo]) / (values[hi] - values[lo]);
    return nodes[lo] + frac * (nodes[hi] - nodes[lo]);
  }
};

/// Tabulates Phi_q = sum_k c_k P_k on `table`'s grid. Plateaus produced by
/// floating-point saturation in the Gaussian tails are collapsed; a genuine
/// decrease throws construction_error.
inline InverseCdfInterpolant build_inverse_cdf(const ConditionalMixture& mixture,
                                               const PrimitiveTable& table) {
  if (table.family() != mixture.family || table.max_degree() < mixture.max_degree()) {
    throw structural_error("build_inverse_cdf: table does not cover the mixture");
  }
  const std::size_t last = table.grid_size() - 1;
  const double total = table.mixture_cdf(last, mixture.coefficients);
  InverseCdfInterpolant out;
  out.q = mixture.q;
  for (std::size_t i = 0; i <= last; ++i) {
    const double v = table.mixture_cdf(i, mixture.coefficients) / total;
    const double t = table.node_t(i);
    if (!out.values.empty()) {
      if (v < out.values.back() - 1e-13) {
        std::ostringstream msg;
        msg << "inverse CDF table decreases at node " << i << " (t=" << t
            << "): " << out.values.back() << " -> " << v;
        throw construction_error(msg.str());
      }
      if (v <= out.values.back()) {
        // Keep the outermost node of a flat run on the right tail.
        if (out.values.back() >= 0.5) out.nodes.back() = t;
        continue;
      }
    }
    out.values.push_back(v);
    out.nodes.push_back(t);
  }
  out.values.back() = 1.0;
  return out;
}

inline InverseCdfInterpolant build_inverse_cdf(const ConditionalMixture& mixture,
                                               std::size_t grid_size) {
  if (grid_size < 2) throw std::invalid_argument("build_inverse_cdf: grid_size < 2");
  const PrimitiveTable table(mixture.family, mixture.max_degree(), grid_size);
  return build_inverse_cdf(mixture, table);
}

inline constexpr double kInverseTransformTolerance = 1e-10;

/// Solves Phi(z) = u on a primitive table: binary search over node CDFs, a
/// piecewise-linear seed inside the bracketing panel, then refinement with
/// bisection or safeguarded Newton until |Phi(z) - u| <= tol (at most 60
/// steps). Cost O(lambda log grid) plus O(lambda) per refinement step.
inline double invert_mixture_cdf(const PrimitiveTable& table,
                                 std::span<const double> coefficients, double u,
                                 RootSolver solver,
                                 double tol = kInverseTransformTolerance) {
  if (!(u > 0.0 && u < 1.0)) throw domain_error("inverse transform: u not in (0, 1)");
  const std::size_t last = table.grid_size() - 1;
  const double total = table.mixture_cdf(last, coefficients);
  const double target = u * total;
  std::size_t lo = 0;
  std::size_t hi = last;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (table.mixture_cdf(mid, coefficients) <= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double a = table.node_s(lo);
  double b = table.node_s(hi);
  double fa = table.mixture_cdf(lo, coefficients);
  const double fb = table.mixture_cdf(hi, coefficients);
  const BasisFamily family = table.family();
  const int degree = static_cast<int>(coefficients.size()) - 1;
  std::vector<double> phi(coefficients.size());
  auto mapped_mixture = [&](double s) {
    eval_basis_unchecked(family, degree, mapped_to_point(family, s), phi.data());
    double v = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k) v += coefficients[k] * phi[k] * phi[k];
    return v * mapped_density(family, s);
  };

  double s = fb > fa ? a + (target - fa) / (fb - fa) * (b - a) : 0.5 * (a + b);
  if (solver == RootSolver::interpolant) return mapped_to_point(family, s);
  if (solver == RootSolver::bisection) s = 0.5 * (a + b);

  const double abs_tol = tol * total;
  for (int iter = 0; iter < 60; ++iter) {
    const double fs =
        fa + integrate_panel<PrimitiveTable::kPanelOrder>(mapped_mixture, a, s);
    const double r = fs - target;
    if (std::abs(r) <= abs_tol) break;
    if (r < 0.0) {
      a = s;
      fa = fs;
    } else {
      b = s;
    }
    double next = 0.5 * (a + b);
    if (solver == RootSolver::newton) {
      const double slope = mapped_mixture(s);
      if (slope > 0.0) {
        const double newton = s - r / slope;
        if (newton > a && newton < b) next = newton;
      }
    }
    s = next;
  }
  return mapped_to_point(family, s);
}

/// Inverse-transform draw for a mixture given the uniform variate u.
inline double sample_mixture_its(const ConditionalMixture& mixture,
                                 const PrimitiveTable& table, RootSolver solver,
                                 double u) {
  if (table.family() != mixture.family || table.max_degree() < mixture.max_degree()) {
    throw structural_error("sample_mixture_its: table does not cover the mixture");
  }
  if (solver == RootSolver::interpolant) {
    return build_inverse_cdf(mixture, table)(u);
  }
  return invert_mixture_cdf(table, mixture.coefficients, u, solver);
}

inline double sample_mixture_its(const InverseCdfInterpolant& interpolant, double u) {
  return interpolant(u);
}

/// Sequential conditional sampling from mu_m = k_m rho / m. Draw k, coordinate
/// q uses the counter stream keyed by (seed, k, q), so every draw is a pure
/// function of (seed, k) and the output does not depend on thread count.
class OptimalSampler {
 public:
  explicit OptimalSampler(const ApproximationSpace& space,
                          SamplingMethod method = SamplingMethod::automatic,
                          RootSolver solver = RootSolver::newton,
                          std::size_t grid_size = PrimitiveTable::kDefaultGridSize)
      : space_(&space), method_(method), solver_(solver) {
    const std::size_t d = space.dimension();
    use_rejection_.resize(d);
    tables_.resize(d);
    std::map<std::pair<FamilyKind, int>, std::shared_ptr<const PrimitiveTable>> cache;
    for (std::size_t q = 0; q < d; ++q) {
      const BasisFamily family = space.family(q);
      bool rejection = method == SamplingMethod::rejection ||
                       (method == SamplingMethod::automatic && family.bounded());
      if (rejection && !family.bounded()) {
        throw unbounded_family_error(
            "rejection sampling requested for an unbounded (hermite_gaussian) coordinate");
      }
      use_rejection_[q] = rejection;
      if (!rejection && space.max_degree(q) > 0) {
        auto key = std::make_pair(family.kind(), space.max_degree(q));
        auto& slot = cache[key];
        if (!slot) {
          slot = std::make_shared<const PrimitiveTable>(family, space.max_degree(q),
                                                        grid_size);
        }
        tables_[q] = slot;
      }
    }
    // The first conditional does not depend on any prefix.
    first_coefficients_.assign(static_cast<std::size_t>(space.max_degree(0)) + 1, 0.0);
    for (const auto& nu : space.index_set()) first_coefficients_[nu[0]] += 1.0;
    for (double& c : first_coefficients_) c /= static_cast<double>(space.size());
  }

  const ApproximationSpace& space() const { return *space_; }

  /// Draws n i.i.d. points from mu_m with weights m / k_m.
  WeightedSample sample(std::size_t n, std::uint64_t seed, unsigned threads = 1) const {
    if (n == 0) throw std::invalid_argument("sample_optimal: n must be >= 1");
    WeightedSample out;
    out.dimension = space_->dimension();
    out.points.resize(n * out.dimension);
    out.weights.resize(n);
    out.meta = {SamplingMeasure::optimal, seed, method_, space_->fingerprint()};
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
      Workspace ws(*space_);
      for (std::size_t k = begin; k < end; ++k) {
        draw(k, seed, out.point(k), ws);
        out.weights[k] = static_cast<double>(space_->size()) / ws.christoffel;
      }
    });
    return out;
  }

  /// Scratch buffers for one thread.
  struct Workspace {
    explicit Workspace(const ApproximationSpace& space)
        : alpha(space.size()),
          coefficients(static_cast<std::size_t>(space.profile().overall) + 1),
          phi(static_cast<std::size_t>(space.profile().overall) + 1),
          evaluator(space) {}
    std::vector<double> alpha;
    std::vector<double> coefficients;
    std::vector<double> phi;
    TensorEvaluator evaluator;
    double christoffel = 1.0;
  };

  /// The k-th draw for `seed`, written to x; leaves k_m(x) in ws.christoffel.
  void draw(std::size_t k, std::uint64_t seed, std::span<double> x,
            Workspace& ws) const {
    const ApproximationSpace& space = *space_;
    const std::size_t d = space.dimension();
    const std::size_t m = space.size();
    const auto& members = space.index_set().members();
    std::fill(ws.alpha.begin(), ws.alpha.end(), 1.0 / static_cast<double>(m));
    for (std::size_t q = 0; q < d; ++q) {
      const int lambda = space.max_degree(q);
      const BasisFamily family = space.family(q);
      CounterStream stream(seed, k, q);
      std::span<const double> coefficients;
      if (q == 0) {
        coefficients = first_coefficients_;
      } else if (lambda > 0) {
        std::fill_n(ws.coefficients.begin(), lambda + 1, 0.0);
        for (std::size_t j = 0; j < m; ++j) ws.coefficients[members[j][q]] += ws.alpha[j];
        coefficients = std::span<const double>(ws.coefficients.data(),
                                               static_cast<std::size_t>(lambda) + 1);
      }
      double t;
      if (lambda == 0) {
        t = sample_reference(family, stream);
      } else if (use_rejection_[q]) {
        ConditionalMixture mixture{q + 1, family, {coefficients.begin(), coefficients.end()}};
        t = sample_mixture_rejection(mixture, stream);
      } else {
        t = invert_mixture_cdf(*tables_[q], coefficients, stream.uniform(), solver_);
      }
      x[q] = t;
      if (lambda > 0 && q + 1 < d) {
        eval_basis_unchecked(family, lambda, t, ws.phi.data());
        double total = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          const double p = ws.phi[members[j][q]];
          ws.alpha[j] *= p * p;
          total += ws.alpha[j];
        }
        for (double& a : ws.alpha) a /= total;
      }
    }
    ws.evaluator(x);
    ws.christoffel = ws.evaluator.last_christoffel();
  }

 private:
  const ApproximationSpace* space_;
  SamplingMethod method_;
  RootSolver solver_;
  std::vector<bool> use_rejection_;
  std::vector<std::shared_ptr<const PrimitiveTable>> tables_;
  std::vector<double> first_coefficients_;
};

/// n i.i.d. draws from mu_m with weights w_m = m / k_m.
inline WeightedSample sample_optimal(const ApproximationSpace& space, std::size_t n,
                                     std::uint64_t seed,
                                     SamplingMethod method = SamplingMethod::automatic,
                                     unsigned threads = 1) {
  return OptimalSampler(space, method).sample(n, seed, threads);
}

/// n i.i.d. draws from the product measure rho with unit weights.
inline WeightedSample sample_standard(const ApproximationSpace& space, std::size_t n,
                                      std::uint64_t seed, unsigned threads = 1) {
  if (n == 0) throw std::invalid_argument("sample_standard: n must be >= 1");
  WeightedSample out;
  out.dimension = space.dimension();
  out.points.resize(n * out.dimension);
  out.weights.assign(n, 1.0);
  out.meta = {SamplingMeasure::standard, seed, SamplingMethod::automatic,
              space.fingerprint()};
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      auto x = out.point(k);
      for (std::size_t q = 0; q < out.dimension; ++q) {
        CounterStream stream(seed, k, q);
        x[q] = sample_reference(space.family(q), stream);
      }
    }
  });
  return out;
}

}  // namespace wls
