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
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wls/functions.hpp"
#include "wls/index_sets.hpp"
#include "wls/lsq.hpp"
#include "wls/noise.hpp"
#include "wls/parallel.hpp"
#include "wls/random.hpp"
#include "wls/sampler.hpp"

namespace wls {

/// kappa = (1 - ln 2) / (2 + 2r).
inline double kappa(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("kappa: r must be > 0");
  return (1.0 - std::numbers::ln2) / (2.0 + 2.0 * r);
}

struct ConditionCheck {
  bool satisfied = false;
  double kappa = 0.0;
  double budget = 0.0;  // kappa n / ln n
  std::size_t minimal_n = 0;
};

/// Smallest n with m <= kappa n / ln n. n / ln n increases for n >= 3 and
/// kappa * 2 / ln 2 < 1 for every r > 0, so the search starts at 3.
inline std::size_t minimal_n(std::size_t m, double r) {
  if (m == 0) throw std::invalid_argument("minimal_n: m must be >= 1");
  const double k = kappa(r);
  const auto ok = [&](std::size_t n) {
    const double nn = static_cast<double>(n);
    return static_cast<double>(m) <= k * nn / std::log(nn);
  };
  std::size_t lo = 3;
  if (ok(lo)) return lo;
  std::size_t hi = 4;
  while (!ok(hi)) {
    lo = hi;
    if (hi > (std::numeric_limits<std::size_t>::max() >> 2)) {
      throw std::overflow_error("minimal_n: no n found");
    }
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (ok(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

inline ConditionCheck condition_check(std::size_t m, std::size_t n, double r) {
  if (m == 0) throw std::invalid_argument("condition_check: m must be >= 1");
  if (n < 2) throw std::invalid_argument("condition_check: n must be >= 2");
  ConditionCheck c;
  c.kappa = kappa(r);
  const double nn = static_cast<double>(n);
  c.budget = c.kappa * nn / std::log(nn);
  c.satisfied = static_cast<double>(m) <= c.budget;
  c.minimal_n = minimal_n(m, r);
  return c;
}

/// c_delta = delta + (1 - delta) ln(1 - delta).
inline double chernoff_constant(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("chernoff_constant: delta must lie in (0, 1)");
  }
  return delta + (1.0 - delta) * std::log1p(-delta);
}

/// 2m exp(-c_delta n / K), the bound on Pr{||G - I|| > delta}.
inline double chernoff_reference(std::size_t m, std::size_t n, double K, double delta) {
  if (!(K >= static_cast<double>(m))) {
    throw std::invalid_argument("chernoff_reference: K must be >= m");
  }
  return 2.0 * static_cast<double>(m) *
         std::exp(-chernoff_constant(delta) * static_cast<double>(n) / K);
}

// ---------------------------------------------------------------------------
// Stability experiments.

enum class LsMethod { weighted, standard };

inline std::string_view to_string(LsMethod m) {
  return m == LsMethod::weighted ? "weighted" : "standard";
}

inline LsMethod ls_method_from_name(std::string_view name) {
  if (name == "weighted" || name == "optimal") return LsMethod::weighted;
  if (name == "standard") return LsMethod::standard;
  throw std::invalid_argument("unknown least-squares method: " + std::string(name));
}

/// Condition numbers above this (including singular Gramians) are recorded
/// as this value and flagged.
inline constexpr double kConditionCap = 1e20;

struct ExperimentConfig {
  BasisFamily family = BasisFamily(FamilyKind::legendre_uniform);
  LsMethod method = LsMethod::weighted;
  std::size_t dimension = 1;
  SequenceStrategy strategy = SequenceStrategy::total_degree_lex;
  std::uint64_t strategy_seed = 0;
  std::vector<std::pair<std::size_t, std::size_t>> cells;  // (n, m)
  std::size_t repetitions = 100;
  std::uint64_t master_seed = 0;
  unsigned threads = 1;

  void validate() const {
    if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
    for (const auto& [n, m] : cells) {
      if (m < 1 || n < m) {
        throw std::invalid_argument("cell (n=" + std::to_string(n) + ", m=" +
                                    std::to_string(m) + ") violates n >= m >= 1");
      }
    }
  }
};

struct StabilityCell {
  std::size_t n = 0;
  std::size_t m = 0;
  double probability = 0.0;     // #{cond <= 3} / R
  double mean_cond = 0.0;       // arithmetic mean of capped cond
  double median_cond = 0.0;
  std::size_t capped = 0;       // repetitions whose cond hit the cap
  std::size_t repetitions = 0;
  std::size_t successes = 0;
  double tail_frequency = 0.0;  // #{||G - I|| > 1/2} / R
  double mean_dist = 0.0;
};

namespace detail {

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

inline StabilityCell summarize(std::size_t n, std::size_t m,
                               const std::vector<SpectralStats>& stats) {
  StabilityCell cell;
  cell.n = n;
  cell.m = m;
  cell.repetitions = stats.size();
  std::vector<double> conds;
  conds.reserve(stats.size());
  double sum = 0.0;
  double dist = 0.0;
  std::size_t tail = 0;
  for (const SpectralStats& s : stats) {
    double c = s.cond;
    if (!(c <= kConditionCap)) {
      c = kConditionCap;
      ++cell.capped;
    }
    if (s.cond <= kConditionThreshold) ++cell.successes;
    if (s.dist_identity > kDefaultSpectralThreshold) ++tail;
    conds.push_back(c);
    sum += c;
    dist += s.dist_identity;
  }
  const double r = static_cast<double>(stats.size());
  cell.probability = static_cast<double>(cell.successes) / r;
  cell.tail_frequency = static_cast<double>(tail) / r;
  cell.mean_cond = sum / r;
  cell.mean_dist = dist / r;
  cell.median_cond = median(std::move(conds));
  return cell;
}

}  // namespace detail

/// Draws the sample of one repetition.
class RepetitionSampler {
 public:
  RepetitionSampler(const ApproximationSpace& space, LsMethod method)
      : space_(space), method_(method) {
    if (method == LsMethod::weighted) {
      sampler_ = std::make_unique<OptimalSampler>(space_, SamplingMethod::inverse_transform);
    }
  }
  RepetitionSampler(const RepetitionSampler&) = delete;
  RepetitionSampler& operator=(const RepetitionSampler&) = delete;

  WeightedSample operator()(std::size_t n, std::uint64_t seed) const {
    return sampler_ ? sampler_->sample(n, seed) : sample_standard(space_, n, seed);
  }

  const ApproximationSpace& space() const { return space_; }

 private:
  ApproximationSpace space_;
  LsMethod method_;
  std::unique_ptr<OptimalSampler> sampler_;
};

/// Spectral statistics of R independent Gramians for one (n, m) cell.
/// Repetition k uses derive_seed(master, {n, m, k}); the result does not depend
/// on the thread count or on which other cells are run.
inline StabilityCell run_cell(const RepetitionSampler& sampler, std::size_t n,
                              std::size_t repetitions, std::uint64_t master_seed,
                              unsigned threads = 1) {
  const std::size_t m = sampler.space().size();
  std::vector<SpectralStats> stats(repetitions);
  parallel_for(repetitions, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const WeightedSample sample = sampler(n, derive_seed(master_seed, {n, m, k}));
      stats[k] = spectral_stats(assemble_gram(sampler.space(), sample));
    }
  });
  return detail::summarize(n, m, stats);
}

/// Empirical Pr{cond(G) <= 3} and mean cond(G) on every (n, m) cell, with
/// Lambda_m taken from the nested sequence of the configured strategy.
inline std::vector<StabilityCell> stability_grid(const ExperimentConfig& config) {
  config.validate();
  std::size_t m_max = 0;
  for (const auto& cell : config.cells) m_max = std::max(m_max, cell.second);
  if (m_max == 0) return {};
  const std::vector<IndexSet> sequence =
      nested_sequence(config.dimension, m_max, config.strategy, config.strategy_seed);
  std::map<std::size_t, std::unique_ptr<RepetitionSampler>> samplers;
  std::vector<StabilityCell> out;
  out.reserve(config.cells.size());
  for (const auto& [n, m] : config.cells) {
    auto& slot = samplers[m];
    if (!slot) {
      slot = std::make_unique<RepetitionSampler>(
          ApproximationSpace::isotropic(config.family, sequence[m - 1]), config.method);
    }
    out.push_back(run_cell(*slot, n, config.repetitions, config.master_seed, config.threads));
  }
  return out;
}

/// Cells of an n x m grid, skipping n < m.
inline std::vector<std::pair<std::size_t, std::size_t>> grid_cells(
    const std::vector<std::size_t>& n_values, const std::vector<std::size_t>& m_values) {
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t m : m_values) {
    for (std::size_t n : n_values) {
      if (n >= m) cells.emplace_back(n, m);
    }
  }
  return cells;
}

/// `count` values from lo to hi, equispaced in log scale and rounded.
inline std::vector<std::size_t> geometric_values(std::size_t lo, std::size_t hi,
                                                 std::size_t count) {
  if (count < 2 || lo < 1 || hi <= lo) throw std::invalid_argument("geometric_values: bad range");
  std::vector<std::size_t> out;
  const double a = std::log(static_cast<double>(lo));
  const double b = std::log(static_cast<double>(hi));
  for (std::size_t i = 0; i < count; ++i) {
    const double v = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    const auto n = static_cast<std::size_t>(std::llround(v));
    if (out.empty() || n > out.back()) out.push_back(n);
  }
  return out;
}

/// `count` values from lo to hi, equispaced and rounded.
inline std::vector<std::size_t> linear_values(std::size_t lo, std::size_t hi, std::size_t count) {
  if (count < 2 || hi <= lo) throw std::invalid_argument("linear_values: bad range");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double v = static_cast<double>(lo) + static_cast<double>(hi - lo) *
                                                   static_cast<double>(i) /
                                                   static_cast<double>(count - 1);
    const auto m = static_cast<std::size_t>(std::llround(v));
    if (out.empty() || m > out.back()) out.push_back(m);
  }
  return out;
}

struct HighDimConfig {
  std::vector<std::size_t> dimensions = {1, 2, 5, 10, 50, 100};
  std::vector<BasisFamily> families = {BasisFamily(FamilyKind::legendre_uniform),
                                       BasisFamily(FamilyKind::hermite_gaussian),
                                       BasisFamily(FamilyKind::chebyshev_arcsine)};
  std::vector<LsMethod> methods = {LsMethod::weighted, LsMethod::standard};
  std::size_t n = 26559;
  std::size_t m = 200;
  std::size_t repetitions = 100;
  /// Per-dimension override of the repetition count.
  std::map<std::size_t, std::size_t> repetitions_by_dimension;
  SequenceStrategy strategy = SequenceStrategy::total_degree_lex;
  std::uint64_t strategy_seed = 0;
  std::uint64_t master_seed = 0;
  unsigned threads = 1;

  std::size_t repetitions_for(std::size_t d) const {
    const auto it = repetitions_by_dimension.find(d);
    return it == repetitions_by_dimension.end() ? repetitions : it->second;
  }

  void validate() const {
    if (m < 1 || n < m) throw std::invalid_argument("high-dim table needs n >= m >= 1");
    if (dimensions.empty() || families.empty() || methods.empty()) {
      throw std::invalid_argument("high-dim table needs dimensions, families and methods");
    }
    for (std::size_t d : dimensions) {
      if (d < 1) throw std::invalid_argument("dimension must be >= 1");
      if (repetitions_for(d) < 1) throw std::invalid_argument("repetitions must be >= 1");
    }
  }
};

struct HighDimRow {
  LsMethod method = LsMethod::weighted;
  BasisFamily family = BasisFamily(FamilyKind::legendre_uniform);
  std::size_t dimension = 1;
  StabilityCell cell;
};

/// One row per (method, family, dimension), in that nesting order.
inline std::vector<HighDimRow> high_dim_table(const HighDimConfig& config) {
  config.validate();
  std::vector<HighDimRow> rows;
  for (LsMethod method : config.methods) {
    for (const BasisFamily& family : config.families) {
      for (std::size_t d : config.dimensions) {
        const IndexSet set =
            nested_sequence(d, config.m, config.strategy, config.strategy_seed).back();
        const RepetitionSampler sampler(ApproximationSpace::isotropic(family, set), method);
        HighDimRow row{method, family, d, {}};
        row.cell = run_cell(sampler, config.n, config.repetitions_for(d),
                            derive_seed(config.master_seed, {d}), config.threads);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Best uniform approximation on [-1, 1].

struct MinimaxResult {
  double lower = 0.0;  // min |error| on the alternating reference
  double upper = 0.0;  // max |error| of the computed polynomial on a fine grid
  int iterations = 0;
  std::vector<double> chebyshev_coefficients;
};

/// Remez exchange for the best uniform approximation of f by polynomials of
/// degree <= degree on [-1, 1]. The error of the final polynomial alternates
/// in sign on the reference, so `lower` <= e_inf(f) <= `upper`.
inline MinimaxResult uniform_best_error(const std::function<double(double)>& f, int degree,
                                        std::size_t grid = 20001, int max_iterations = 60) {
  if (degree < 0) throw std::invalid_argument("uniform_best_error: degree < 0");
  const int size = degree + 2;
  std::vector<double> ref(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) {
    ref[static_cast<std::size_t>(i)] = -std::cos(std::numbers::pi * i / (size - 1));
  }
  auto cheb = [&](double x, std::vector<double>& t) {
    t[0] = 1.0;
    if (degree >= 1) t[1] = x;
    for (int k = 2; k <= degree; ++k) {
      t[static_cast<std::size_t>(k)] = 2.0 * x * t[static_cast<std::size_t>(k - 1)] -
                                       t[static_cast<std::size_t>(k - 2)];
    }
  };
  std::vector<double> t(static_cast<std::size_t>(degree) + 1);
  Eigen::VectorXd coeffs;
  auto poly = [&](double x) {
    cheb(x, t);
    double v = 0.0;
    for (int k = 0; k <= degree; ++k) v += coeffs[k] * t[static_cast<std::size_t>(k)];
    return v;
  };
  auto err = [&](double x) { return f(x) - poly(x); };

  MinimaxResult out;
  std::vector<double> xs(grid);
  for (std::size_t i = 0; i < grid; ++i) {
    xs[i] = -std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(grid - 1));
  }
  for (int iter = 1; iter <= max_iterations; ++iter) {
    Eigen::MatrixXd a(size, size);
    Eigen::VectorXd b(size);
    for (int i = 0; i < size; ++i) {
      cheb(ref[static_cast<std::size_t>(i)], t);
      for (int k = 0; k <= degree; ++k) a(i, k) = t[static_cast<std::size_t>(k)];
      a(i, degree + 1) = (i % 2 == 0) ? 1.0 : -1.0;
      b[i] = f(ref[static_cast<std::size_t>(i)]);
    }
    const Eigen::VectorXd sol = a.partialPivLu().solve(b);
    coeffs = sol.head(degree + 1);
    out.iterations = iter;

    // Local extrema of the error on the grid, refined by golden section.
    std::vector<double> ex;
    std::vector<double> ev(grid);
    for (std::size_t i = 0; i < grid; ++i) ev[i] = err(xs[i]);
    for (std::size_t i = 0; i < grid; ++i) {
      const double here = std::abs(ev[i]);
      const bool left = i == 0 || here >= std::abs(ev[i - 1]);
      const bool right = i + 1 == grid || here >= std::abs(ev[i + 1]);
      if (!(left && right)) continue;
      double x = xs[i];
      if (i > 0 && i + 1 < grid) {
        double lo = xs[i - 1];
        double hi = xs[i + 1];
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int s = 0; s < 40; ++s) {
          const double c = hi - g * (hi - lo);
          const double d = lo + g * (hi - lo);
          if (std::abs(err(c)) > std::abs(err(d))) {
            hi = d;
          } else {
            lo = c;
          }
        }
        const double cand = 0.5 * (lo + hi);
        if (std::abs(err(cand)) > here) x = cand;
      }
      if (ex.empty() || x > ex.back()) ex.push_back(x);
    }
    // Alternating subsequence: merge same-sign neighbours, keep the larger.
    std::vector<double> alt;
    for (double x : ex) {
      if (!alt.empty() && std::signbit(err(x)) == std::signbit(err(alt.back()))) {
        if (std::abs(err(x)) > std::abs(err(alt.back()))) alt.back() = x;
      } else {
        alt.push_back(x);
      }
    }
    while (alt.size() > static_cast<std::size_t>(size)) {
      if (std::abs(err(alt.front())) < std::abs(err(alt.back()))) {
        alt.erase(alt.begin());
      } else {
        alt.pop_back();
      }
    }
    double upper = 0.0;
    for (double x : ex) upper = std::max(upper, std::abs(err(x)));
    for (double v : ev) upper = std::max(upper, std::abs(v));
    if (alt.size() < static_cast<std::size_t>(size)) {
      // Degenerate (e.g. f already in the space): the levelled error bounds.
      out.lower = 0.0;
      out.upper = upper;
      break;
    }
    double lower = std::numeric_limits<double>::infinity();
    for (double x : alt) lower = std::min(lower, std::abs(err(x)));
    out.lower = lower;
    out.upper = upper;
    ref = alt;
    if (upper - lower <= 1e-12 * std::max(upper, 1e-300) || upper < 1e-14) break;
  }
  out.chebyshev_coefficients.assign(coeffs.data(), coeffs.data() + coeffs.size());
  return out;
}

// ---------------------------------------------------------------------------
// Error studies.

struct ErrorStudyConfig {
  BasisFamily family = BasisFamily(FamilyKind::legendre_uniform);
  std::size_t dimension = 1;
  SequenceStrategy strategy = SequenceStrategy::total_degree_lex;
  std::uint64_t strategy_seed = 0;
  std::string target = "exp";
  std::vector<std::size_t> m_values = {2, 3, 4, 5, 6, 7, 8};
  double r = 1.0;
  Estimator estimator = Estimator::plain();
  LsMethod method = LsMethod::weighted;
  NoiseModel noise = NoiseModel::none();
  std::size_t repetitions = 100;
  std::uint64_t master_seed = 0;
  ErrorMethod error_method = ErrorMethod::quadrature();

  void validate() const {
    if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    if (m_values.empty()) throw std::invalid_argument("error study needs m values");
    for (std::size_t m : m_values) {
      if (m < 1) throw std::invalid_argument("m must be >= 1");
    }
    if (!(r > 0.0)) throw std::invalid_argument("r must be > 0");
  }
};

struct ErrorStudyRow {
  std::size_t m = 0;
  std::size_t n = 0;
  double mean_error = 0.0;
  double max_error = 0.0;
  double best_error = 0.0;  // e_m(u) in L^2(rho)
  /// Bounds on e_m(u)_inf; present for d = 1 on [-1, 1].
  std::optional<MinimaxResult> uniform_error;
  std::size_t within_bound = 0;  // runs with error <= (1 + sqrt 2) e_m(u)_inf lower bound
  std::vector<double> errors;
};

/// For each m: n = minimal_n(m, r), R seeded fits, L^2(rho) errors, e_m(u).
inline std::vector<ErrorStudyRow> error_study(const ErrorStudyConfig& config) {
  config.validate();
  std::size_t m_max = *std::max_element(config.m_values.begin(), config.m_values.end());
  const std::vector<IndexSet> sequence =
      nested_sequence(config.dimension, m_max, config.strategy, config.strategy_seed);
  std::vector<ErrorStudyRow> rows;
  for (std::size_t m : config.m_values) {
    const ApproximationSpace space = ApproximationSpace::isotropic(config.family, sequence[m - 1]);
    const Function u = make_target(config.target, space);
    ErrorStudyRow row;
    row.m = m;
    row.n = std::max(minimal_n(m, config.r), m);
    row.best_error = best_approx_error(space, u, config.error_method);
    if (config.dimension == 1 && config.family.bounded()) {
      const auto u1 = [&u](double t) { return u(std::span<const double>(&t, 1)); };
      row.uniform_error = uniform_best_error(u1, static_cast<int>(m) - 1);
    }
    const RepetitionSampler sampler(space, config.method);
    row.errors.resize(config.repetitions);
    for (std::size_t k = 0; k < config.repetitions; ++k) {
      const std::uint64_t seed = derive_seed(config.master_seed, {row.n, m, k});
      const WeightedSample sample = sampler(row.n, seed);
      const std::vector<double> y = observe(u, sample, config.noise, derive_seed(seed, {1}));
      const FitResult f = fit(space, sample, y, config.estimator);
      row.errors[k] = l2_error(space, f, u, config.error_method);
    }
    double sum = 0.0;
    for (double e : row.errors) {
      sum += e;
      row.max_error = std::max(row.max_error, e);
      if (row.uniform_error &&
          e <= (1.0 + std::numbers::sqrt2) * row.uniform_error->lower) {
        ++row.within_bound;
      }
    }
    row.mean_error = sum / static_cast<double>(row.errors.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace wls
