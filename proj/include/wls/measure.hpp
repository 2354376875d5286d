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

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "wls/basis.hpp"
#include "wls/error.hpp"
#include "wls/index_sets.hpp"

namespace wls {

/// V_m = span{L_nu : nu in Lambda} with L_nu(x) = prod_i phi^i_{nu_i}(x_i),
/// orthonormal in L^2 of the product measure rho = prod_i rho_i.
class ApproximationSpace {
 public:
  ApproximationSpace(std::vector<BasisFamily> families, IndexSet index_set)
      : families_(std::move(families)),
        index_set_(std::move(index_set)),
        profile_(degree_profile(index_set_)) {
    if (families_.size() != index_set_.dimension()) {
      throw structural_error("ApproximationSpace: family count != dimension");
    }
    offsets_.resize(families_.size() + 1, 0);
    for (std::size_t i = 0; i < families_.size(); ++i) {
      offsets_[i + 1] = offsets_[i] + profile_.per_dimension[i] + 1;
    }
    term_start_.reserve(index_set_.size() + 1);
    term_start_.push_back(0);
    for (const auto& nu : index_set_) {
      for (std::size_t i = 0; i < nu.dimension(); ++i) {
        if (nu[i] > 0) factors_.push_back(offsets_[i] + nu[i]);
      }
      term_start_.push_back(factors_.size());
    }
  }

  /// Same family in every coordinate.
  static ApproximationSpace isotropic(BasisFamily family, IndexSet index_set) {
    std::vector<BasisFamily> families(index_set.dimension(), family);
    return ApproximationSpace(std::move(families), std::move(index_set));
  }

  std::size_t dimension() const { return families_.size(); }
  std::size_t size() const { return index_set_.size(); }
  const BasisFamily& family(std::size_t i) const { return families_[i]; }
  const std::vector<BasisFamily>& families() const { return families_; }
  const IndexSet& index_set() const { return index_set_; }
  const DegreeProfile& profile() const { return profile_; }
  int max_degree(std::size_t i) const { return profile_.per_dimension[i]; }

  bool all_bounded() const {
    for (const auto& f : families_) {
      if (!f.bounded()) return false;
    }
    return true;
  }

  /// Length of the flattened table of univariate values (sum of lambda_i + 1).
  std::size_t univariate_table_size() const { return offsets_.back(); }
  std::size_t univariate_offset(std::size_t i) const { return offsets_[i]; }

  /// Fills `table` with phi^i_j(x_i) for j <= lambda_i, coordinate by
  /// coordinate. Throws domain_error for a coordinate outside its support.
  void eval_univariate(std::span<const double> x, std::span<double> table) const {
    check_point(x);
    for (std::size_t i = 0; i < families_.size(); ++i) {
      eval_basis_unchecked(families_[i], profile_.per_dimension[i], x[i],
                           table.data() + offsets_[i]);
    }
  }

  /// L_nu values in index-set order from a univariate table.
  void combine(std::span<const double> table, std::span<double> out) const {
    for (std::size_t j = 0; j + 1 < term_start_.size(); ++j) {
      double v = 1.0;
      for (std::size_t f = term_start_[j]; f < term_start_[j + 1]; ++f) {
        v *= table[factors_[f]];
      }
      out[j] = v;
    }
  }

  /// Flattened-table positions of the factors of L_nu for the j-th member.
  std::span<const std::size_t> factors(std::size_t j) const {
    return {factors_.data() + term_start_[j], term_start_[j + 1] - term_start_[j]};
  }

  void check_point(std::span<const double> x) const {
    if (x.size() != families_.size()) {
      throw structural_error("point dimension " + std::to_string(x.size()) +
                             " != space dimension " +
                             std::to_string(families_.size()));
    }
    for (std::size_t i = 0; i < x.size(); ++i) check_support(families_[i], x[i]);
  }

  /// Short hex digest of the families and the index set.
  std::string fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](std::uint64_t v) {
      for (int b = 0; b < 8; ++b) {
        h ^= (v >> (8 * b)) & 0xffU;
        h *= 0x100000001b3ULL;
      }
    };
    feed(families_.size());
    for (const auto& f : families_) feed(static_cast<std::uint64_t>(f.kind()));
    feed(index_set_.size());
    for (const auto& nu : index_set_) {
      for (int v : nu.degrees()) feed(static_cast<std::uint64_t>(v));
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

 private:
  std::vector<BasisFamily> families_;
  IndexSet index_set_;
  DegreeProfile profile_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> factors_;
  std::vector<std::size_t> term_start_;
};

/// Reusable buffers for repeated tensor-basis evaluation on one space.
class TensorEvaluator {
 public:
  explicit TensorEvaluator(const ApproximationSpace& space)
      : space_(&space),
        table_(space.univariate_table_size()),
        values_(space.size()) {}

  std::span<const double> operator()(std::span<const double> x) {
    space_->eval_univariate(x, table_);
    space_->combine(table_, values_);
    return values_;
  }

  /// k_m at the point most recently evaluated.
  double last_christoffel() const {
    double k = 0.0;
    for (double v : values_) k += v * v;
    return k;
  }

  std::span<const double> univariate_table() const { return table_; }

 private:
  const ApproximationSpace* space_;
  std::vector<double> table_;
  std::vector<double> values_;
};

/// (L_nu(x))_{nu in Lambda}.
inline std::vector<double> eval_tensor_basis(const ApproximationSpace& space,
                                             std::span<const double> x) {
  TensorEvaluator eval(space);
  const auto values = eval(x);
  return {values.begin(), values.end()};
}

/// k_m(x) = sum_nu |L_nu(x)|^2; at least 1 since L_0 = 1.
inline double christoffel(const ApproximationSpace& space,
                          std::span<const double> x) {
  TensorEvaluator eval(space);
  eval(x);
  return eval.last_christoffel();
}

/// w_m(x) = m / k_m(x).
inline double optimal_weight(const ApproximationSpace& space,
                             std::span<const double> x) {
  return static_cast<double>(space.size()) / christoffel(space, x);
}

/// rho(x) = prod_i rho_i(x_i).
inline double reference_density(const ApproximationSpace& space,
                                 std::span<const double> x) {
  if (x.size() != space.dimension()) {
    throw structural_error("reference_density: dimension mismatch");
  }
  double r = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) r *= density(space.family(i), x[i]);
  return r;
}

/// mu_m(x) = k_m(x) rho(x) / m.
inline double optimal_density(const ApproximationSpace& space,
                              std::span<const double> x) {
  return christoffel(space, x) * reference_density(space, x) /
         static_cast<double>(space.size());
}

/// Marginal of mu_m in the first q coordinates (q is 1-based, prefix has q
/// entries):  rho_{A^q}(prefix) / m * sum_nu prod_{i<=q} |phi_{nu_i}(prefix_i)|^2.
inline double marginal(const ApproximationSpace& space, std::size_t q,
                       std::span<const double> prefix) {
  if (q < 1 || q > space.dimension()) {
    throw std::out_of_range("marginal: q out of range");
  }
  if (prefix.size() != q) throw structural_error("marginal: prefix length != q");
  std::vector<std::vector<double>> phi(q);
  double rho = 1.0;
  for (std::size_t i = 0; i < q; ++i) {
    phi[i] = eval_basis(space.family(i), space.max_degree(i), prefix[i]);
    rho *= density(space.family(i), prefix[i]);
  }
  double sum = 0.0;
  for (const auto& nu : space.index_set()) {
    double p = 1.0;
    for (std::size_t i = 0; i < q; ++i) p *= phi[i][nu[i]] * phi[i][nu[i]];
    sum += p;
  }
  return rho * sum / static_cast<double>(space.size());
}

/// Univariate density rho_q(t) * sum_k c_k |phi_k(t)|^2 with convex weights c.
struct ConditionalMixture {
  std::size_t q = 1;  // 1-based coordinate
  BasisFamily family;
  std::vector<double> coefficients;

  int max_degree() const { return static_cast<int>(coefficients.size()) - 1; }

  /// sum_k c_k |phi_k(t)|^2, the density relative to rho_q.
  double relative_density(double t) const {
    std::vector<double> phi(coefficients.size());
    eval_basis_unchecked(family, max_degree(), t, phi.data());
    double s = 0.0;
    for (std::size_t k = 0; k < coefficients.size(); ++k) {
      s += coefficients[k] * phi[k] * phi[k];
    }
    return s;
  }

  double density(double t) const {
    const double r = wls::density(family, t);
    if (r == 0.0) return 0.0;
    return r * relative_density(t);
  }

  /// Phi(t) = sum_k c_k P_k(t) from the closed-form/quadrature primitives.
  double cdf(double t) const {
    double s = 0.0;
    for (std::size_t k = 0; k < coefficients.size(); ++k) {
      if (coefficients[k] != 0.0) {
        s += coefficients[k] *
             weighted_square_primitive(family, static_cast<int>(k), t);
      }
    }
    return s;
  }
};

/// Per-degree mixture weights of the conditional density of coordinate q
/// given the first q-1 coordinates (q is 1-based, prefix has q-1 entries):
///   c_k = sum_{nu: nu_q = k} alpha_nu,
///   alpha_nu = prod_{j<q} |phi_{nu_j}(z_j)|^2 / sum_nu prod_{j<q} |phi_{nu_j}(z_j)|^2.
/// For q = 1, alpha_nu = 1/m. The formula stays finite at points where rho of
/// the prefix vanishes, giving the continuous extension there.
inline ConditionalMixture conditional_mixture(const ApproximationSpace& space,
                                              std::size_t q,
                                              std::span<const double> prefix) {
  if (q < 1 || q > space.dimension()) {
    throw std::out_of_range("conditional_mixture: q out of range");
  }
  if (prefix.size() != q - 1) {
    throw structural_error("conditional_mixture: prefix length != q - 1");
  }
  std::vector<std::vector<double>> phi(q - 1);
  for (std::size_t i = 0; i + 1 < q; ++i) {
    phi[i] = eval_basis(space.family(i), space.max_degree(i), prefix[i]);
  }
  ConditionalMixture mixture;
  mixture.q = q;
  mixture.family = space.family(q - 1);
  mixture.coefficients.assign(
      static_cast<std::size_t>(space.max_degree(q - 1)) + 1, 0.0);
  double total = 0.0;
  for (const auto& nu : space.index_set()) {
    double alpha = 1.0;
    for (std::size_t i = 0; i + 1 < q; ++i) alpha *= phi[i][nu[i]] * phi[i][nu[i]];
    mixture.coefficients[nu[q - 1]] += alpha;
    total += alpha;
  }
  for (double& c : mixture.coefficients) c /= total;
  return mixture;
}

}  // namespace wls
