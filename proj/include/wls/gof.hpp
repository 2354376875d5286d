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
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace wls::gof {

/// Asymptotic Kolmogorov survival function Pr{sqrt(n) D > x}.
inline double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// Asymptotic critical values c(alpha) with Pr{sqrt(n) D > c} = alpha.
inline double ks_coefficient(double alpha) {
  if (alpha == 0.01) return 1.628;
  if (alpha == 0.05) return 1.358;
  if (alpha == 0.001) return 1.9495;
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ks: alpha not in (0, 1)");
  return std::sqrt(-0.5 * std::log(alpha / 2.0));
}

struct KsResult {
  double statistic = 0.0;
  double critical = 0.0;
  double p_value = 1.0;
  bool rejected = false;
};

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
inline KsResult ks_one_sample(std::vector<double> samples,
                              const std::function<double(double)>& cdf, double alpha) {
  if (samples.empty()) throw std::invalid_argument("ks_one_sample: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  KsResult r;
  r.statistic = d;
  r.critical = ks_coefficient(alpha) / std::sqrt(n);
  r.p_value = kolmogorov_sf(std::sqrt(n) * d);
  r.rejected = d > r.critical;
  return r;
}

/// Two-sample Kolmogorov-Smirnov test.
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double scale = std::sqrt((na + nb) / (na * nb));
  KsResult r;
  r.statistic = d;
  r.critical = ks_coefficient(alpha) * scale;
  r.p_value = kolmogorov_sf(d / scale);
  r.rejected = d > r.critical;
  return r;
}

struct ChiSquareResult {
  double statistic = 0.0;
  double critical = 0.0;
  double p_value = 1.0;
  std::size_t dof = 0;
  bool rejected = false;
};

/// Pearson chi-square test on equal-width bins of [lo, hi].
inline ChiSquareResult chi_square_bins(const std::vector<double>& samples,
                                       const std::function<double(double)>& cdf, double lo,
                                       double hi, std::size_t bins, double alpha) {
  if (bins < 2 || samples.empty() || !(hi > lo)) {
    throw std::invalid_argument("chi_square_bins: bad arguments");
  }
  std::vector<double> counts(bins, 0.0);
  for (double x : samples) {
    if (x < lo || x > hi) throw std::invalid_argument("chi_square_bins: sample outside range");
    auto b = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
    counts[std::min(b, bins - 1)] += 1.0;
  }
  const double n = static_cast<double>(samples.size());
  const double width = (hi - lo) / static_cast<double>(bins);
  double stat = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double a = lo + width * static_cast<double>(b);
    const double c = b + 1 == bins ? hi : a + width;
    const double expected = n * (cdf(c) - cdf(a));
    if (!(expected > 0.0)) throw std::invalid_argument("chi_square_bins: empty expected bin");
    stat += (counts[b] - expected) * (counts[b] - expected) / expected;
  }
  ChiSquareResult r;
  r.statistic = stat;
  r.dof = bins - 1;
  const boost::math::chi_squared dist(static_cast<double>(r.dof));
  r.critical = boost::math::quantile(boost::math::complement(dist, alpha));
  r.p_value = boost::math::cdf(boost::math::complement(dist, stat));
  r.rejected = stat > r.critical;
  return r;
}

}  // namespace wls::gof
