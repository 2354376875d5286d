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

#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "wls/error.hpp"
#include "wls/gof.hpp"
#include "wls/measure.hpp"
#include "wls/sampler.hpp"

namespace {

using wls::ApproximationSpace;
using wls::BasisFamily;
using wls::ConditionalMixture;
using wls::FamilyKind;
using wls::IndexSet;
using wls::MultiIndex;
using wls::RootSolver;
using wls::SamplingMethod;

const BasisFamily kLegendre(FamilyKind::legendre_uniform);
const BasisFamily kChebyshev(FamilyKind::chebyshev_arcsine);
const BasisFamily kHermite(FamilyKind::hermite_gaussian);

ApproximationSpace line(std::size_t m, BasisFamily f = kLegendre) {
  return ApproximationSpace::isotropic(f, IndexSet::univariate(m));
}

ApproximationSpace corner(BasisFamily f = kLegendre) {
  return ApproximationSpace::isotropic(
      f, IndexSet(2, {MultiIndex({0, 0}), MultiIndex({1, 0}), MultiIndex({0, 1})}));
}

// Closed-form CDF of (1 + 3 t^2) / 4 on [-1, 1].
double line2_cdf(double t) { return t / 4 + t * t * t / 4 + 0.5; }

// Bisection oracle for a monotone CDF on [lo, hi].
double bisect(const std::function<double(double)>& cdf, double u, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> coordinate(const wls::WeightedSample& s, std::size_t q) {
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s.point(i)[q];
  return out;
}

TEST(SampleOptimal, ConstantSpaceIsReferenceMeasure) {
  for (FamilyKind kind : wls::kAllFamilies) {
    const auto space = ApproximationSpace::isotropic(BasisFamily(kind), IndexSet(3, {MultiIndex(3)}));
    const auto s = wls::sample_optimal(space, 2000, 4);
    for (double w : s.weights) EXPECT_DOUBLE_EQ(w, 1.0);
    const auto ref = wls::sample_standard(space, 2000, 4);
    const auto ks = wls::gof::ks_two_sample(coordinate(s, 2), coordinate(ref, 2), 0.001);
    EXPECT_FALSE(ks.rejected) << ks.statistic;
  }
}

TEST(SampleOptimal, LineOfTwoMatchesClosedFormCdf) {
  for (auto method : {SamplingMethod::inverse_transform, SamplingMethod::rejection}) {
    const auto s = wls::sample_optimal(line(2), 100000, 2024, method);
    const auto ks = wls::gof::ks_one_sample(coordinate(s, 0), line2_cdf, 0.01);
    EXPECT_FALSE(ks.rejected) << wls::to_string(method) << " D=" << ks.statistic
                              << " crit=" << ks.critical;
  }
}

TEST(SampleOptimal, CornerSetFirstMarginalChiSquare) {
  const auto s = wls::sample_optimal(corner(), 100000, 77);
  // Primitive of (2 + 3 t^2) / 6.
  const auto cdf = [](double t) { return (2.0 * (t + 1.0) + t * t * t + 1.0) / 6.0; };
  const auto chi = wls::gof::chi_square_bins(coordinate(s, 0), cdf, -1.0, 1.0, 50, 0.01);
  EXPECT_FALSE(chi.rejected) << chi.statistic << " crit " << chi.critical;
}

TEST(SampleOptimal, CornerSetSecondCoordinateGivenFirst) {
  // Joint check: the second coordinate conditioned on |x_1| < 0.1 follows
  // approximately (1 + 3 t^2) / 4 (the exact conditional at x_1 = 0).
  const auto s = wls::sample_optimal(corner(), 200000, 78);
  std::vector<double> second;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::abs(s.point(i)[0]) < 0.02) second.push_back(s.point(i)[1]);
  }
  ASSERT_GT(second.size(), 1500u);
  const auto ks = wls::gof::ks_one_sample(second, line2_cdf, 0.01);
  EXPECT_FALSE(ks.rejected) << ks.statistic;
}

TEST(SampleOptimal, WeightsAreRecomputable) {
  for (FamilyKind kind : wls::kAllFamilies) {
    const auto space = ApproximationSpace::isotropic(
        BasisFamily(kind), wls::nested_sequence(3, 25, wls::SequenceStrategy::total_degree_lex, 0).back());
    const auto s = wls::sample_optimal(space, 1000, 9);
    EXPECT_EQ(s.meta.measure, wls::SamplingMeasure::optimal);
    EXPECT_EQ(s.meta.fingerprint, space.fingerprint());
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_GT(s.weights[i], 0.0);
      EXPECT_NEAR(s.weights[i], wls::optimal_weight(space, s.point(i)),
                  1e-12 * s.weights[i]);
    }
  }
}

TEST(SampleOptimal, DeterministicAcrossThreadCounts) {
  const auto space = ApproximationSpace::isotropic(
      kHermite, wls::nested_sequence(3, 20, wls::SequenceStrategy::total_degree_lex, 0).back());
  const auto a = wls::sample_optimal(space, 999, 5, SamplingMethod::automatic, 1);
  const auto b = wls::sample_optimal(space, 999, 5, SamplingMethod::automatic, 4);
  const auto c = wls::sample_optimal(space, 999, 5, SamplingMethod::automatic, 1);
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.points, c.points);
  const auto d = wls::sample_optimal(space, 999, 6);
  EXPECT_NE(a.points, d.points);
  // Prefixes agree: draw k depends only on (seed, k).
  const auto e = wls::sample_optimal(space, 500, 5);
  EXPECT_TRUE(std::equal(e.points.begin(), e.points.end(), a.points.begin()));
}

TEST(SampleOptimal, Errors) {
  EXPECT_THROW(wls::sample_optimal(line(3, kHermite), 10, 1, SamplingMethod::rejection),
               wls::unbounded_family_error);
  EXPECT_THROW(wls::sample_optimal(line(3), 0, 1), std::invalid_argument);
  EXPECT_NO_THROW(wls::sample_optimal(line(3, kHermite), 10, 1, SamplingMethod::automatic));
}

TEST(Rejection, EnvelopeConstants) {
  EXPECT_DOUBLE_EQ(wls::rejection_constant({1, kChebyshev, {0.5, 0.5}}), 2.0);
  EXPECT_DOUBLE_EQ(wls::rejection_constant({1, kChebyshev, {0.2, 0.3, 0.1, 0.4}}), 2.0);
  EXPECT_DOUBLE_EQ(wls::rejection_constant({1, kLegendre, {0.2, 0.3, 0.5}}), 5.0);
  EXPECT_DOUBLE_EQ(wls::rejection_constant({1, kLegendre, {1.0}}), 1.0);
}

TEST(Rejection, AcceptanceRateIsOneOverM) {
  for (const ConditionalMixture& mix :
       {ConditionalMixture{1, kLegendre, {0.1, 0.2, 0.3, 0.4}},
        ConditionalMixture{1, kChebyshev, {0.25, 0.25, 0.5}},
        ConditionalMixture{1, kLegendre, {1.0, 0.0, 0.0}}}) {
    wls::CounterStream stream(31);
    const std::size_t draws = 20000;
    std::size_t rounds = 0;
    for (std::size_t i = 0; i < draws; ++i) {
      std::size_t r = 0;
      wls::sample_mixture_rejection(mix, stream, &r);
      rounds += r;
    }
    const double p = 1.0 / wls::rejection_constant(mix);
    const double rate = static_cast<double>(draws) / static_cast<double>(rounds);
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(rounds));
    EXPECT_NEAR(rate, p, 3.0 * sigma) << mix.family.name();
  }
}

TEST(Rejection, BaseDensityWhenOnlyConstantTerm) {
  const ConditionalMixture mix{1, kChebyshev, {1.0, 0.0, 0.0}};
  wls::CounterStream stream(8);
  std::vector<double> x(20000);
  for (double& v : x) v = wls::sample_mixture_rejection(mix, stream);
  const auto ks = wls::gof::ks_one_sample(
      x, [](double t) { return std::asin(t) / std::numbers::pi + 0.5; }, 0.01);
  EXPECT_FALSE(ks.rejected);
}

TEST(Rejection, RoundCapRaisesAnomaly) {
  const ConditionalMixture degenerate{1, kLegendre, {0.0, 0.0}};
  EXPECT_THROW(wls::sample_mixture_rejection(degenerate, 1), wls::sampling_anomaly);
}

TEST(Rejection, AgreesWithInverseTransformInDistribution) {
  for (const ConditionalMixture& mix :
       {ConditionalMixture{1, kLegendre, {0.2, 0.1, 0.3, 0.4}},
        ConditionalMixture{1, kChebyshev, {0.5, 0.0, 0.25, 0.25}}}) {
    const wls::PrimitiveTable table(mix.family, mix.max_degree());
    wls::CounterStream a(100);
    wls::CounterStream b(200);
    std::vector<double> rs(100000);
    std::vector<double> its(100000);
    for (double& v : rs) v = wls::sample_mixture_rejection(mix, a);
    for (double& v : its) v = wls::sample_mixture_its(mix, table, RootSolver::newton, b.uniform());
    const auto ks = wls::gof::ks_two_sample(rs, its, 0.001);
    EXPECT_FALSE(ks.rejected) << ks.statistic << " crit " << ks.critical;
  }
}

TEST(InverseCdf, UniformMixture) {
  const ConditionalMixture mix{1, kLegendre, {1.0}};
  const auto inv = wls::build_inverse_cdf(mix, 1025);
  EXPECT_NEAR(inv(0.25), -0.5, 1e-12);
  for (std::size_t i = 0; i + 1 < inv.values.size(); ++i) EXPECT_LT(inv.values[i], inv.values[i + 1]);
  EXPECT_DOUBLE_EQ(inv.values.back(), 1.0);
}

TEST(InverseCdf, LineOfTwo) {
  const ConditionalMixture mix{1, kLegendre, {0.5, 0.5}};
  EXPECT_NEAR(mix.cdf(0.0), 0.5, 1e-15);
  // Root of t + t^3 = 1.6.
  const double oracle = bisect(line2_cdf, 0.9, -1.0, 1.0);
  EXPECT_NEAR(oracle + oracle * oracle * oracle, 1.6, 1e-14);
  const auto inv = wls::build_inverse_cdf(mix, 1025);
  EXPECT_NEAR(inv(0.9), oracle, 1e-5);
  const wls::PrimitiveTable table(kLegendre, 1);
  for (auto solver : {RootSolver::bisection, RootSolver::newton}) {
    const double z = wls::sample_mixture_its(mix, table, solver, 0.9);
    EXPECT_NEAR(z, oracle, 1e-9);
    EXPECT_LE(std::abs(line2_cdf(z) - 0.9), 1e-10);
  }
}

TEST(InverseCdf, SymmetricAndGaussianQuantile) {
  for (const BasisFamily& f : {kLegendre, kChebyshev, kHermite}) {
    const ConditionalMixture mix{1, f, {0.1, 0.3, 0.2, 0.4}};
    const wls::PrimitiveTable table(f, 3);
    EXPECT_NEAR(wls::sample_mixture_its(mix, table, RootSolver::bisection, 0.5), 0.0, 1e-9);
    EXPECT_NEAR(wls::sample_mixture_its(mix, table, RootSolver::newton, 0.5), 0.0, 1e-9);
  }
  const ConditionalMixture uni{1, kLegendre, {1.0}};
  EXPECT_NEAR(wls::sample_mixture_its(uni, wls::PrimitiveTable(kLegendre, 0), RootSolver::newton, 0.75),
              0.5, 1e-10);
  const ConditionalMixture gauss{1, kHermite, {1.0}};
  const double q = boost::math::quantile(boost::math::normal(), 0.975);
  EXPECT_NEAR(q, 1.959964, 1e-6);
  const wls::PrimitiveTable table(kHermite, 0);
  // |Phi(z) - u| <= 1e-10 allows |z - q| up to 1e-10 / phi(q) ~ 1.7e-9.
  EXPECT_NEAR(wls::sample_mixture_its(gauss, table, RootSolver::newton, 0.975), q, 2e-9);
  EXPECT_NEAR(wls::sample_mixture_its(gauss, table, RootSolver::bisection, 0.975), q, 2e-9);
}

TEST(InverseCdf, RootSolversMeetTolerance) {
  for (const BasisFamily& f : {kLegendre, kChebyshev, kHermite}) {
    for (int lambda : {1, 7, 40, 199}) {
      const wls::PrimitiveTable table(f, lambda);
      std::vector<double> c(lambda + 1);
      wls::CounterStream rng(lambda);
      double total = 0.0;
      for (double& v : c) total += (v = rng.uniform());
      for (double& v : c) v /= total;
      const ConditionalMixture mix{1, f, c};
      for (double u : {1e-6, 0.01, 0.3, 0.5, 0.77, 0.999, 1 - 1e-7}) {
        for (auto solver : {RootSolver::bisection, RootSolver::newton}) {
          const double z = wls::sample_mixture_its(mix, table, solver, u);
          EXPECT_LE(std::abs(mix.cdf(z) - u), 1e-9) << f.name() << " lambda=" << lambda << " u=" << u;
        }
      }
    }
  }
}

TEST(InverseCdf, DomainErrors) {
  const ConditionalMixture mix{1, kLegendre, {1.0}};
  const wls::PrimitiveTable table(kLegendre, 0);
  EXPECT_THROW(wls::sample_mixture_its(mix, table, RootSolver::newton, 0.0), wls::domain_error);
  EXPECT_THROW(wls::sample_mixture_its(mix, table, RootSolver::newton, 1.0), wls::domain_error);
  EXPECT_THROW(wls::build_inverse_cdf(mix, 1), std::invalid_argument);
}

TEST(SampleStandard, Moments) {
  const auto s = wls::sample_standard(corner(), 100000, 3);
  for (double w : s.weights) EXPECT_EQ(w, 1.0);
  for (std::size_t q = 0; q < 2; ++q) {
    double mean = 0.0;
    for (double v : coordinate(s, q)) mean += v;
    mean /= 100000.0;
    EXPECT_NEAR(mean, 0.0, 3.0 * std::sqrt(1.0 / 3.0 / 100000.0));
  }
  const auto g = wls::sample_standard(line(1, kHermite), 1000000, 12);
  double sum = 0.0;
  double sq = 0.0;
  for (double v : g.points) {
    sum += v;
    sq += v * v;
  }
  const double n = 1e6;
  const double var = (sq - sum * sum / n) / (n - 1);
  EXPECT_NEAR(var, 1.0, 3.0 * std::sqrt(2.0 / n));
}

TEST(SampleStandard, ArcsineCdf) {
  const auto s = wls::sample_standard(line(4, kChebyshev), 100000, 21);
  const auto ks = wls::gof::ks_one_sample(
      s.points, [](double t) { return std::asin(t) / std::numbers::pi + 0.5; }, 0.01);
  EXPECT_FALSE(ks.rejected) << ks.statistic;
}

}  // namespace
