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
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wls/error.hpp"
#include "wls/gauss.hpp"

namespace wls {

/// The three reference measures and their orthonormal polynomial systems:
///   legendre_uniform   dt/2 on [-1, 1],             phi_j = sqrt(2j+1) P_j
///   chebyshev_arcsine  dt/(pi sqrt(1-t^2)),         phi_0 = 1, phi_j = sqrt(2) T_j
///   hermite_gaussian   standard normal on R,        phi_j = He_j / sqrt(j!)
enum class FamilyKind { legendre_uniform, chebyshev_arcsine, hermite_gaussian };

inline constexpr std::array<FamilyKind, 3> kAllFamilies = {
    FamilyKind::legendre_uniform, FamilyKind::chebyshev_arcsine,
    FamilyKind::hermite_gaussian};

namespace detail {

// Orthonormal recurrence  t phi_j = b_{j+1} phi_{j+1} + b_j phi_{j-1}.
inline double jacobi_offdiagonal(FamilyKind kind, int j) {
  const double jj = static_cast<double>(j);
  switch (kind) {
    case FamilyKind::legendre_uniform:
      return jj / std::sqrt(4.0 * jj * jj - 1.0);
    case FamilyKind::chebyshev_arcsine:
      return j == 1 ? std::numbers::sqrt2 / 2.0 : 0.5;
    case FamilyKind::hermite_gaussian:
      return std::sqrt(jj);
  }
  return 0.0;
}

// phi_{j+1} = t * lead[j] * phi_j - lag[j] * phi_{j-1}
struct RecurrenceTable {
  std::vector<double> lead;
  std::vector<double> lag;
};

inline constexpr int kRecurrenceTableSize = 4096;

inline RecurrenceTable make_recurrence_table(FamilyKind kind) {
  RecurrenceTable table;
  table.lead.resize(kRecurrenceTableSize);
  table.lag.resize(kRecurrenceTableSize);
  for (int j = 0; j < kRecurrenceTableSize; ++j) {
    const double next = jacobi_offdiagonal(kind, j + 1);
    table.lead[j] = 1.0 / next;
    table.lag[j] = j == 0 ? 0.0 : jacobi_offdiagonal(kind, j) / next;
  }
  return table;
}

inline const RecurrenceTable& recurrence_table(FamilyKind kind) {
  static const RecurrenceTable legendre =
      make_recurrence_table(FamilyKind::legendre_uniform);
  static const RecurrenceTable chebyshev =
      make_recurrence_table(FamilyKind::chebyshev_arcsine);
  static const RecurrenceTable hermite =
      make_recurrence_table(FamilyKind::hermite_gaussian);
  switch (kind) {
    case FamilyKind::legendre_uniform: return legendre;
    case FamilyKind::chebyshev_arcsine: return chebyshev;
    case FamilyKind::hermite_gaussian: return hermite;
  }
  return legendre;
}

}  // namespace detail

/// Descriptor of a univariate measure together with its orthonormal family.
/// Cheap to copy; all evaluation is a pure function of the kind.
class BasisFamily {
 public:
  constexpr BasisFamily() = default;
  constexpr explicit BasisFamily(FamilyKind kind) : kind_(kind) {}

  static BasisFamily from_name(std::string_view name) {
    if (name == "legendre_uniform" || name == "uniform" || name == "legendre") {
      return BasisFamily(FamilyKind::legendre_uniform);
    }
    if (name == "chebyshev_arcsine" || name == "chebyshev") {
      return BasisFamily(FamilyKind::chebyshev_arcsine);
    }
    if (name == "hermite_gaussian" || name == "gaussian" || name == "hermite") {
      return BasisFamily(FamilyKind::hermite_gaussian);
    }
    throw std::invalid_argument("unknown basis family: " + std::string(name));
  }

  constexpr FamilyKind kind() const { return kind_; }

  std::string_view name() const {
    switch (kind_) {
      case FamilyKind::legendre_uniform: return "legendre_uniform";
      case FamilyKind::chebyshev_arcsine: return "chebyshev_arcsine";
      case FamilyKind::hermite_gaussian: return "hermite_gaussian";
    }
    return "";
  }

  constexpr bool bounded() const {
    return kind_ != FamilyKind::hermite_gaussian;
  }

  double lower() const {
    return bounded() ? -1.0 : -std::numeric_limits<double>::infinity();
  }
  double upper() const {
    return bounded() ? 1.0 : std::numeric_limits<double>::infinity();
  }

  bool in_support(double t) const {
    if (std::isnan(t)) return false;
    return bounded() ? (t >= -1.0 && t <= 1.0) : std::isfinite(t);
  }

  /// b_j of the symmetric Jacobi matrix, j >= 1.
  double recurrence_coefficient(int j) const {
    return detail::jacobi_offdiagonal(kind_, j);
  }

  friend constexpr bool operator==(BasisFamily, BasisFamily) = default;

 private:
  FamilyKind kind_ = FamilyKind::legendre_uniform;
};

/// Fills out[0..j_max] with phi_0(t)..phi_{j_max}(t); no support check.
inline void eval_basis_unchecked(const BasisFamily& family, int j_max, double t,
                                 double* out) {
  out[0] = 1.0;
  if (j_max == 0) return;
  const auto& table = detail::recurrence_table(family.kind());
  out[1] = t * table.lead[0];
  for (int j = 1; j < j_max; ++j) {
    if (j < detail::kRecurrenceTableSize) {
      out[j + 1] = t * table.lead[j] * out[j] - table.lag[j] * out[j - 1];
    } else {
      const double next = family.recurrence_coefficient(j + 1);
      out[j + 1] =
          (t * out[j] - family.recurrence_coefficient(j) * out[j - 1]) / next;
    }
  }
}

inline void check_support(const BasisFamily& family, double t) {
  if (!family.in_support(t)) {
    throw domain_error("point " + std::to_string(t) + " outside the support of " +
                       std::string(family.name()));
  }
}

inline void eval_basis(const BasisFamily& family, int j_max, double t,
                       std::span<double> out) {
  if (j_max < 0) throw std::invalid_argument("eval_basis: j_max < 0");
  if (out.size() < static_cast<std::size_t>(j_max) + 1) {
    throw structural_error("eval_basis: output span too small");
  }
  check_support(family, t);
  eval_basis_unchecked(family, j_max, t, out.data());
}

/// phi_0(t), ..., phi_{j_max}(t) by the stable three-term recurrence.
inline std::vector<double> eval_basis(const BasisFamily& family, int j_max,
                                      double t) {
  std::vector<double> out(static_cast<std::size_t>(std::max(j_max, 0)) + 1);
  eval_basis(family, j_max, t, out);
  return out;
}

/// Density rho of the family's measure; 0 outside a bounded support and +inf
/// at the Chebyshev endpoints.
inline double density(const BasisFamily& family, double t) {
  switch (family.kind()) {
    case FamilyKind::legendre_uniform:
      return (t >= -1.0 && t <= 1.0) ? 0.5 : 0.0;
    case FamilyKind::chebyshev_arcsine:
      if (t < -1.0 || t > 1.0) return 0.0;
      if (t == -1.0 || t == 1.0) return std::numeric_limits<double>::infinity();
      return 1.0 / (std::numbers::pi * std::sqrt((1.0 - t) * (1.0 + t)));
    case FamilyKind::hermite_gaussian:
      return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
  }
  return 0.0;
}

/// Upper bound on ||phi_j||_inf; exact for the two bounded families.
inline double sup_norm_bound(const BasisFamily& family, int j) {
  switch (family.kind()) {
    case FamilyKind::legendre_uniform:
      return std::sqrt(2.0 * j + 1.0);
    case FamilyKind::chebyshev_arcsine:
      return j == 0 ? 1.0 : std::numbers::sqrt2;
    case FamilyKind::hermite_gaussian:
      break;
  }
  throw unbounded_family_error(
      "hermite_gaussian polynomials are unbounded; use inverse-transform sampling");
}

/// Radius beyond which rho * phi_j^2 carries negligible mass (< 1e-12) for
/// every j <= max_degree.
inline double gaussian_truncation_radius(int max_degree) {
  return std::max(10.0, std::sqrt(4.0 * max_degree + 4.0) + 8.0);
}

/// Smooth reparametrisation used by the inverse-CDF machinery. Bounded
/// families use t = -cos(s), s in [0, pi], which removes the Chebyshev endpoint
/// singularity and clusters resolution near +-1; Gaussian uses t = s on
/// [-R, R].
struct MappedSupport {
  double lo;
  double hi;
};

inline MappedSupport mapped_support(const BasisFamily& family, int max_degree) {
  if (family.bounded()) return {0.0, std::numbers::pi};
  const double r = gaussian_truncation_radius(max_degree);
  return {-r, r};
}

inline double mapped_to_point(const BasisFamily& family, double s) {
  return family.bounded() ? -std::cos(s) : s;
}

inline double point_to_mapped(const BasisFamily& family, double t) {
  if (family.bounded()) return std::acos(std::clamp(-t, -1.0, 1.0));
  return t;
}

/// rho(t(s)) * dt/ds, finite everywhere.
inline double mapped_density(const BasisFamily& family, double s) {
  switch (family.kind()) {
    case FamilyKind::legendre_uniform:
      return 0.5 * std::sin(s);
    case FamilyKind::chebyshev_arcsine:
      return std::numbers::inv_pi;
    case FamilyKind::hermite_gaussian:
      return density(family, s);
  }
  return 0.0;
}

namespace detail {

inline double standard_normal_cdf(double t) {
  return 0.5 * std::erfc(-t / std::numbers::sqrt2);
}

}  // namespace detail

/// P_j(t) = integral of rho(s) phi_j(s)^2 over (inf support, t].
/// Chebyshev and Gaussian use closed forms; Legendre integrates in the mapped
/// variable with panels sized to the oscillation of phi_j.
inline double weighted_square_primitive(const BasisFamily& family, int j,
                                        double t) {
  if (j < 0) throw std::invalid_argument("weighted_square_primitive: j < 0");
  if (std::isnan(t)) throw domain_error("weighted_square_primitive: NaN");
  if (t <= family.lower()) return 0.0;
  if (t >= family.upper()) return 1.0;
  switch (family.kind()) {
    case FamilyKind::chebyshev_arcsine: {
      // With t = cos(theta): mass above t is (theta + sin(2 j theta)/(2 j))/pi.
      const double theta = std::acos(t);
      double above = theta;
      if (j > 0) above += std::sin(2.0 * j * theta) / (2.0 * j);
      return 1.0 - above * std::numbers::inv_pi;
    }
    case FamilyKind::hermite_gaussian: {
      // d/dt[-rho phi_{i-1} phi_i / sqrt(i)] = rho (phi_i^2 - phi_{i-1}^2).
      std::vector<double> phi(static_cast<std::size_t>(j) + 1);
      eval_basis_unchecked(family, j, t, phi.data());
      double telescoped = 0.0;
      for (int i = 1; i <= j; ++i) {
        telescoped += phi[i - 1] * phi[i] / std::sqrt(static_cast<double>(i));
      }
      return detail::standard_normal_cdf(t) - density(family, t) * telescoped;
    }
    case FamilyKind::legendre_uniform: {
      const double s_end = point_to_mapped(family, t);
      std::vector<double> phi(static_cast<std::size_t>(j) + 1);
      auto integrand = [&](double s) {
        eval_basis_unchecked(family, j, -std::cos(s), phi.data());
        return mapped_density(family, s) * phi[j] * phi[j];
      };
      const auto panels = static_cast<std::size_t>(
          std::ceil(s_end / std::numbers::pi * (2.0 * j + 2.0))) + 1;
      return std::clamp(integrate_composite<10>(integrand, 0.0, s_end, panels),
                        0.0, 1.0);
    }
  }
  return 0.0;
}

}  // namespace wls
