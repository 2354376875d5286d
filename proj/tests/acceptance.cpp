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

// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "wls/wls.hpp"

namespace {

using wls::ApproximationSpace;
using wls::BasisFamily;
using wls::FamilyKind;
using wls::IndexSet;
using wls::LsMethod;

int g_failures = 0;

void report(int id, bool pass, const std::string& detail, double seconds) {
  std::printf("%s criterion %d: %s [%.1f s]\n", pass ? "PASS" : "FAIL", id, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void timed(int id, const std::function<std::pair<bool, std::string>()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    std::tie(pass, detail) = body();
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(id, pass, detail, s);
}

ApproximationSpace space_for(FamilyKind kind, std::size_t d, std::size_t m,
                             wls::SequenceStrategy strategy = wls::SequenceStrategy::total_degree_lex) {
  return ApproximationSpace::isotropic(BasisFamily(kind),
                                       wls::nested_sequence(d, m, strategy, 1).back());
}

std::vector<double> coordinate(const wls::WeightedSample& s, std::size_t q) {
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s.point(i)[q];
  return out;
}

// |w k - m| over 1000 reference draws per space.
std::pair<bool, std::string> optimal_weight_identity() {
  double worst = 0.0;
  std::size_t spaces = 0;
  for (FamilyKind kind : wls::kAllFamilies) {
    for (std::size_t d : {1u, 2u, 5u, 10u}) {
      for (std::size_t m : {1u, 7u, 30u, 100u}) {
        for (auto strategy : {wls::SequenceStrategy::total_degree_lex, wls::SequenceStrategy::random_admissible}) {
          const auto space = space_for(kind, d, m, strategy);
          const auto pts = wls::sample_standard(space, 1000, wls::derive_seed(1, {d, m}));
          for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto x = pts.point(i);
            const double v = wls::optimal_weight(space, x) * wls::christoffel(space, x);
            worst = std::max(worst, std::abs(v - static_cast<double>(m)));
          }
          ++spaces;
        }
      }
    }
  }
  return {worst < 1e-9, fmt("max |w k - m| = %.3g over %zu spaces x 1000 points (tol 1e-9)", worst, spaces)};
}

std::pair<bool, std::string> density_normalization() {
  double worst_quad = 0.0;
  for (FamilyKind kind : wls::kAllFamilies) {
    for (std::size_t d : {1u, 2u, 3u}) {
      for (std::size_t m : {1u, 10u, 40u}) {
        const auto space = space_for(kind, d, m, wls::SequenceStrategy::random_admissible);
        double sum = 0.0;
        // Gauss rules of the reference measure integrate mu / rho = k / m.
        wls::for_each_tensor_node(space.families(), wls::default_quadrature_points(space, 3),
                                  [&](std::span<const double> x, double w) {
                                    sum += w * wls::christoffel(space, x) / static_cast<double>(m);
                                  });
        worst_quad = std::max(worst_quad, std::abs(sum - 1.0));
      }
    }
  }
  bool mc_ok = true;
  double worst_z = 0.0;
  for (FamilyKind kind : wls::kAllFamilies) {
    const auto space = space_for(kind, 10, 100, wls::SequenceStrategy::random_admissible);
    const std::size_t n = 1000000;
    const auto pts = wls::sample_standard(space, n, 17);
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = wls::christoffel(space, pts.point(i)) / 100.0;
      s1 += v;
      s2 += v * v;
    }
    const double mean = s1 / n;
    const double sd = std::sqrt((s2 / n - mean * mean) / (n - 1.0));
    const double z = std::abs(mean - 1.0) / sd;
    worst_z = std::max(worst_z, z);
    mc_ok = mc_ok && z <= 3.0;
  }
  return {worst_quad < 1e-8 && mc_ok,
          fmt("quadrature d<=3 max |int mu - 1| = %.3g (tol 1e-8); d=10 Monte Carlo max |z| = %.2f (tol 3)",
              worst_quad, worst_z)};
}

std::pair<bool, std::string> sampler_ks() {
  const auto space = ApproximationSpace::isotropic(BasisFamily(FamilyKind::legendre_uniform),
                                                   IndexSet::univariate(2));
  const auto its = wls::sample_optimal(space, 100000, 301, wls::SamplingMethod::inverse_transform);
  const auto rs = wls::sample_optimal(space, 100000, 302, wls::SamplingMethod::rejection);
  const auto cdf = [](double t) { return t / 4 + t * t * t / 4 + 0.5; };
  const auto one = wls::gof::ks_one_sample(coordinate(its, 0), cdf, 0.01);
  const auto two = wls::gof::ks_two_sample(coordinate(rs, 0), coordinate(its, 0), 0.001);
  return {!one.rejected && !two.rejected,
          fmt("ITS vs closed form D=%.5f (crit %.5f at 0.01); RS vs ITS D=%.5f (crit %.5f at 0.001)",
              one.statistic, one.critical, two.statistic, two.critical)};
}

std::pair<bool, std::string> marginal_chi_square() {
  const auto space = ApproximationSpace::isotropic(
      BasisFamily(FamilyKind::legendre_uniform),
      IndexSet(2, {wls::MultiIndex({0, 0}), wls::MultiIndex({1, 0}), wls::MultiIndex({0, 1})}));
  const auto s = wls::sample_optimal(space, 100000, 401);
  // Primitive of (2 + 3 t^2) / 6 from -1.
  const auto cdf = [](double t) { return (2.0 * (t + 1.0) + t * t * t + 1.0) / 6.0; };
  const auto chi = wls::gof::chi_square_bins(coordinate(s, 0), cdf, -1.0, 1.0, 50, 0.01);
  return {!chi.rejected, fmt("chi-square = %.2f, 49 dof, critical %.2f at 0.01", chi.statistic, chi.critical)};
}

std::vector<wls::HighDimRow> g_weighted_rows;

std::pair<bool, std::string> weighted_probability() {
  wls::HighDimConfig c;
  c.dimensions = {1, 10};
  c.methods = {LsMethod::weighted};
  c.repetitions = 100;
  c.master_seed = 2026;
  g_weighted_rows = wls::high_dim_table(c);
  bool ok = true;
  std::string detail = "n=26559 m=200 R=100 Pr{cond<=3}:";
  for (const auto& row : g_weighted_rows) {
    ok = ok && row.cell.probability == 1.0;
    detail += fmt(" %s/d=%zu %.2f", std::string(row.family.name()).c_str(), row.dimension, row.cell.probability);
  }
  detail += fmt(" (theory 1 - %.3g)", wls::chernoff_reference(200, 26559, 200.0, 0.5));
  return {ok, detail};
}

std::pair<bool, std::string> weighted_mean_cond() {
  if (g_weighted_rows.empty()) return {false, "criterion 5 runs unavailable"};
  bool ok = true;
  std::string detail = "mean cond in [1.30, 1.80]:";
  for (const auto& row : g_weighted_rows) {
    ok = ok && row.cell.mean_cond >= 1.30 && row.cell.mean_cond <= 1.80;
    detail += fmt(" %s/d=%zu %.4f", std::string(row.family.name()).c_str(), row.dimension, row.cell.mean_cond);
  }
  return {ok, detail};
}

std::pair<bool, std::string> standard_gaussian() {
  wls::HighDimConfig c;
  c.dimensions = {1};
  c.methods = {LsMethod::standard};
  c.families = {BasisFamily(FamilyKind::hermite_gaussian)};
  c.repetitions = 100;
  c.master_seed = 2026;
  const auto cell = wls::high_dim_table(c)[0].cell;
  return {cell.probability == 0.0 && cell.mean_cond > 1e6,
          fmt("Pr{cond<=3} = %.2f, mean cond = %.3g, median cond = %.3g, capped %zu/100",
              cell.probability, cell.mean_cond, cell.median_cond, cell.capped)};
}

std::pair<bool, std::string> stability_grids() {
  const auto n_values = wls::geometric_values(10, 40000, 15);
  const auto m_values = wls::linear_values(1, 40, 15);
  const auto cells = wls::grid_cells(n_values, m_values);
  bool ok = true;
  std::string detail;
  double slowest = 0.0;
  struct Run {
    FamilyKind kind;
    LsMethod method;
  };
  for (const Run& run : {Run{FamilyKind::legendre_uniform, LsMethod::weighted},
                         Run{FamilyKind::chebyshev_arcsine, LsMethod::weighted},
                         Run{FamilyKind::hermite_gaussian, LsMethod::weighted},
                         Run{FamilyKind::legendre_uniform, LsMethod::standard}}) {
    wls::ExperimentConfig c;
    c.family = BasisFamily(run.kind);
    c.method = run.method;
    c.cells = cells;
    c.repetitions = 100;
    c.master_seed = 7;
    const auto t0 = std::chrono::steady_clock::now();
    const auto out = wls::stability_grid(c);
    slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    std::size_t checked = 0;
    std::size_t short_cells = 0;
    double worst = 1.0;
    double last_short = 0.0;  // largest (n / ln n) / m among weighted cells below 1
    for (const auto& cell : out) {
      const double ratio = static_cast<double>(cell.n) / std::log(static_cast<double>(cell.n));
      const double m = static_cast<double>(cell.m);
      if (run.method == LsMethod::weighted ? ratio >= 4.0 * m : ratio >= m * m) {
        ++checked;
        worst = std::min(worst, cell.probability);
        if (run.method == LsMethod::weighted && cell.probability < 1.0) {
          ++short_cells;
          last_short = std::max(last_short, ratio / m);
        }
      }
    }
    const double need = run.method == LsMethod::weighted ? 1.0 : 0.90;
    ok = ok && checked > 0 && worst >= need;
    detail += fmt("%s%s/%s: %zu cells, min Pr %.2f (need %.2f)", detail.empty() ? "" : "; ",
                  std::string(BasisFamily(run.kind).name()).c_str(),
                  std::string(wls::to_string(run.method)).c_str(), checked, worst, need);
    if (short_cells > 0) {
      detail += fmt(", %zu below 1 with (n/ln n)/m <= %.2f", short_cells, last_short);
    }
  }
  ok = ok && slowest < 1800.0;
  detail += fmt("; slowest grid %.0f s (limit 1800)", slowest);
  return {ok, detail};
}

std::pair<bool, std::string> exact_reproduction() {
  std::size_t passed = 0;
  std::size_t total = 0;
  double worst = 0.0;
  const std::size_t m = 12;
  for (FamilyKind kind : wls::kAllFamilies) {
    for (std::size_t d : {1u, 2u, 5u}) {
      const auto space = space_for(kind, d, m, wls::SequenceStrategy::random_admissible);
      const wls::OptimalSampler sampler(space);
      const std::size_t n = wls::minimal_n(m, 1.0);
      for (std::uint64_t k = 0; k < 100; ++k) {
        const std::uint64_t seed = wls::derive_seed(909, {d, k});
        wls::CounterStream rng(seed, 1);
        std::vector<double> coeffs(m);
        for (double& c : coeffs) c = rng.normal();
        const wls::Function u = wls::polynomial_in_space(space, coeffs);
        const auto sample = sampler.sample(n, seed);
        const auto fit = wls::fit(space, sample, wls::observe(u, sample, wls::NoiseModel::none(), 0));
        if (!(fit.stats.lambda_min > wls::kRankTolerance * fit.stats.lambda_max)) continue;  // singular G
        const Eigen::Map<const Eigen::VectorXd> truth(coeffs.data(), static_cast<Eigen::Index>(m));
        const double rel = (fit.coefficients - truth).norm() / truth.norm();
        worst = std::max(worst, rel);
        ++total;
        if (rel <= 1e-8) ++passed;
      }
    }
  }
  return {total == 900 && passed == total,
          fmt("%zu/%zu runs (3 measures x d in {1,2,5} x 100, m=%zu) within 1e-8, max rel error %.3g",
              passed, total, m, worst)};
}

std::pair<bool, std::string> near_optimality() {
  wls::ErrorStudyConfig c;
  c.target = "exp";
  c.m_values = {2, 3, 4, 5, 6, 7, 8};
  c.repetitions = 100;
  c.master_seed = 10;
  const auto rows = wls::error_study(c);
  bool ok = true;
  std::string detail = "runs within (1+sqrt2) e_inf:";
  for (const auto& row : rows) {
    ok = ok && row.uniform_error && row.within_bound >= 95;
    detail += fmt(" m=%zu(n=%zu) %zu", row.m, row.n, row.within_bound);
  }
  return {ok, detail + " (need >= 95 of 100)"};
}

std::pair<bool, std::string> noise_scaling() {
  const std::size_t m = 10;
  const auto space = space_for(FamilyKind::legendre_uniform, 1, m);
  const std::size_t n = wls::minimal_n(m, 1.0);
  const wls::OptimalSampler sampler(space);
  const wls::Function zero = wls::make_target("zero", space);
  std::vector<double> xs;
  std::vector<double> ys;
  std::string detail;
  for (double sigma : {0.1, 0.2, 0.4}) {
    double mse = 0.0;
    const int reps = 200;
    for (int k = 0; k < reps; ++k) {
      // Independent samples and noise for every sigma.
      const std::uint64_t seed = wls::derive_seed(1100, {static_cast<std::uint64_t>(sigma * 1000), std::uint64_t(k)});
      const auto sample = sampler.sample(n, seed);
      const auto y = wls::observe(zero, sample, wls::NoiseModel::gaussian(sigma), wls::derive_seed(seed, {1}));
      const double e = wls::l2_error(space, wls::fit(space, sample, y), zero);
      mse += e * e;
    }
    mse /= reps;
    xs.push_back(std::log(sigma));
    ys.push_back(std::log(mse));
    detail += fmt("sigma=%.1f mse=%.4g (m sigma^2/n=%.4g) ", sigma, mse, m * sigma * sigma / n);
  }
  const double mx = (xs[0] + xs[1] + xs[2]) / 3.0;
  const double my = (ys[0] + ys[1] + ys[2]) / 3.0;
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < 3; ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = num / den;
  return {std::abs(slope - 2.0) <= 0.3, detail + fmt("slope %.4f (need 2 +- 0.3)", slope)};
}

std::pair<bool, std::string> oracle_equivalence() {
  wls::CounterStream rng(1200);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + trial % 5;
    const int rank = 1 + (trial / 5) % (m - 1);
    Eigen::MatrixXd b(m, rank);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < rank; ++j) b(i, j) = rng.normal();
    }
    wls::NormalSystem sys;
    sys.gram = b * b.transpose();
    sys.gram = (0.5 * (sys.gram + sys.gram.transpose())).eval();
    sys.rhs = Eigen::VectorXd(m);
    for (int i = 0; i < m; ++i) sys.rhs[i] = rng.normal();
    // Oracle: SVD pseudo-inverse.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.gram, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double cut = 1e-12 * svd.singularValues()[0];
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i) {
      if (svd.singularValues()[i] > cut) inv[i] = 1.0 / svd.singularValues()[i];
    }
    const Eigen::VectorXd oracle = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose() * sys.rhs;
    worst = std::max(worst, (wls::solve_min_norm(sys) - oracle).norm());
  }
  return {worst <= 1e-9, fmt("200 singular systems (m<=6), max |x - pinv(G) d| = %.3g (tol 1e-9)", worst)};
}

}  // namespace

int main() {
  timed(1, optimal_weight_identity);
  timed(2, density_normalization);
  timed(3, sampler_ks);
  timed(4, marginal_chi_square);
  timed(5, weighted_probability);
  timed(6, weighted_mean_cond);
  timed(7, standard_gaussian);
  timed(8, stability_grids);
  timed(9, exact_reproduction);
  timed(10, near_optimality);
  timed(11, noise_scaling);
  timed(12, oracle_equivalence);
  std::printf("%d of 12 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
