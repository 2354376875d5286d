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
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "wls/experiments.hpp"
#include "wls/functions.hpp"
#include "wls/index_sets.hpp"
#include "wls/lsq.hpp"
#include "wls/measure.hpp"
#include "wls/quadrature.hpp"
#include "wls/random.hpp"
#include "wls/sampler.hpp"

namespace wls {

struct InvariantResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline std::vector<ApproximationSpace> verify_spaces() {
  std::vector<ApproximationSpace> spaces;
  for (FamilyKind kind : kAllFamilies) {
    const BasisFamily family(kind);
    spaces.push_back(ApproximationSpace::isotropic(family, IndexSet::univariate(7)));
    spaces.push_back(ApproximationSpace::isotropic(
        family, nested_sequence(2, 9, SequenceStrategy::total_degree_lex, 0).back()));
    spaces.push_back(ApproximationSpace::isotropic(
        family, nested_sequence(3, 12, SequenceStrategy::random_admissible, 5).back()));
  }
  return spaces;
}

template <typename Body>
InvariantResult check(std::string name, Body&& body) {
  InvariantResult r;
  r.name = std::move(name);
  std::ostringstream detail;
  try {
    r.passed = body(detail);
  } catch (const std::exception& e) {
    r.passed = false;
    detail << "exception: " << e.what();
  }
  r.detail = detail.str();
  return r;
}

}  // namespace detail

/// Fast invariant suite behind the `verify` subcommand. Deterministic given
/// the seed; every entry is expected to pass on a correct build.
inline std::vector<InvariantResult> run_invariants(std::uint64_t seed = 0) {
  const std::vector<ApproximationSpace> spaces = detail::verify_spaces();
  std::vector<InvariantResult> out;

  out.push_back(detail::check("nested sequences are downward closed", [&](std::ostream& os) {
    for (SequenceStrategy s : {SequenceStrategy::total_degree_lex,
                               SequenceStrategy::random_admissible}) {
      const auto seq = nested_sequence(4, 30, s, seed);
      for (std::size_t j = 0; j < seq.size(); ++j) {
        if (seq[j].size() != j + 1 || !is_downward_closed(seq[j].members())) {
          os << to_string(s) << " set " << j + 1 << " invalid";
          return false;
        }
      }
    }
    return true;
  }));

  out.push_back(detail::check("basis orthonormality under tensor quadrature", [&](std::ostream& os) {
    double worst = 0.0;
    for (const auto& space : spaces) {
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(space.size()),
                                                static_cast<Eigen::Index>(space.size()));
      TensorEvaluator eval(space);
      for_each_tensor_node(space.families(), default_quadrature_points(space, 2),
                           [&](std::span<const double> x, double w) {
                             const auto v = eval(x);
                             const Eigen::Map<const Eigen::VectorXd> e(
                                 v.data(), static_cast<Eigen::Index>(v.size()));
                             g += w * e * e.transpose();
                           });
      g -= Eigen::MatrixXd::Identity(g.rows(), g.cols());
      worst = std::max(worst, g.cwiseAbs().maxCoeff());
    }
    os << "max |G - I| = " << worst;
    return worst < 1e-10;
  }));

  out.push_back(detail::check("optimal weight identity w k = m", [&](std::ostream& os) {
    double worst = 0.0;
    for (const auto& space : spaces) {
      const WeightedSample s = sample_standard(space, 200, seed);
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double m = static_cast<double>(space.size());
        worst = std::max(worst, std::abs(optimal_weight(space, s.point(i)) *
                                             christoffel(space, s.point(i)) - m));
      }
    }
    os << "max deviation " << worst;
    return worst < 1e-9;
  }));

  out.push_back(detail::check("optimal density integrates to one", [&](std::ostream& os) {
    double worst = 0.0;
    for (const auto& space : spaces) {
      double sum = 0.0;
      for_each_tensor_node(space.families(), default_quadrature_points(space, 2),
                           [&](std::span<const double> x, double w) {
                             sum += w * christoffel(space, x) / static_cast<double>(space.size());
                           });
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    os << "max |integral - 1| = " << worst;
    return worst < 1e-8;
  }));

  out.push_back(detail::check("conditional mixture weights are convex", [&](std::ostream& os) {
    for (const auto& space : spaces) {
      const WeightedSample s = sample_optimal(space, 20, seed);
      for (std::size_t i = 0; i < s.size(); ++i) {
        const auto x = s.point(i);
        for (std::size_t q = 1; q <= space.dimension(); ++q) {
          const auto mix = conditional_mixture(space, q, x.subspan(0, q - 1));
          double total = 0.0;
          for (double c : mix.coefficients) {
            if (c < 0.0) return false;
            total += c;
          }
          if (std::abs(total - 1.0) > 1e-12) {
            os << "coefficient sum " << total;
            return false;
          }
        }
      }
    }
    return true;
  }));

  out.push_back(detail::check("sampling is thread-count invariant", [&](std::ostream& os) {
    const auto& space = spaces[4];
    const WeightedSample a = sample_optimal(space, 300, seed, SamplingMethod::automatic, 1);
    const WeightedSample b = sample_optimal(space, 300, seed, SamplingMethod::automatic, 3);
    const bool same = a.points == b.points && a.weights == b.weights;
    if (!same) os << "outputs differ";
    return same;
  }));

  out.push_back(detail::check("spectral threshold implies cond <= 3", [&](std::ostream& os) {
    std::size_t checked = 0;
    for (const auto& space : spaces) {
      for (std::uint64_t k = 0; k < 5; ++k) {
        const WeightedSample s = sample_optimal(space, 40 + 20 * k, derive_seed(seed, {k}));
        const SpectralStats st = spectral_stats(assemble_gram(space, s));
        if (st.dist_identity <= 0.5 && st.cond > 3.0 * (1.0 + 1e-12)) {
          os << "dist " << st.dist_identity << " but cond " << st.cond;
          return false;
        }
        ++checked;
      }
    }
    os << checked << " Gramians";
    return true;
  }));

  out.push_back(detail::check("exact reproduction of V_m members", [&](std::ostream& os) {
    double worst = 0.0;
    for (const auto& space : spaces) {
      CounterStream rng(seed, 0x7265);
      std::vector<double> c(space.size());
      for (double& v : c) v = 2.0 * rng.uniform() - 1.0;
      const Function u = polynomial_in_space(space, c);
      const WeightedSample s = sample_optimal(space, 20 * space.size(), seed);
      std::vector<double> y(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) y[i] = u(s.point(i));
      const FitResult f = fit(space, s, y);
      for (std::size_t j = 0; j < c.size(); ++j) {
        worst = std::max(worst, std::abs(f.coefficients[static_cast<Eigen::Index>(j)] - c[j]));
      }
    }
    os << "max coefficient error " << worst;
    return worst < 1e-8;
  }));

  out.push_back(detail::check("minimal-norm solve matches pseudo-inverse", [&](std::ostream& os) {
    CounterStream rng(seed, 0x706976);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const int m = 2 + trial % 5;
      const int rank = 1 + trial % (m - 1);
      Eigen::MatrixXd b(m, rank);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < rank; ++j) b(i, j) = rng.normal();
      }
      NormalSystem sys;
      sys.gram = b * b.transpose();
      sys.gram = 0.5 * (sys.gram + sys.gram.transpose()).eval();
      sys.rhs = Eigen::VectorXd(m);
      for (int i = 0; i < m; ++i) sys.rhs[i] = rng.normal();
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.gram);
      Eigen::VectorXd oracle = Eigen::VectorXd::Zero(m);
      const double cut = 1e-12 * es.eigenvalues().maxCoeff();
      for (int i = 0; i < m; ++i) {
        if (es.eigenvalues()[i] > cut) {
          oracle += es.eigenvectors().col(i) *
                    (es.eigenvectors().col(i).dot(sys.rhs) / es.eigenvalues()[i]);
        }
      }
      worst = std::max(worst, (solve_min_norm(sys) - oracle).norm() /
                                  std::max(1.0, oracle.norm()));
    }
    os << "max relative deviation " << worst;
    return worst < 1e-9;
  }));

  out.push_back(detail::check("Chernoff reference at the table budget", [&](std::ostream& os) {
    const double p = chernoff_reference(200, 26559, 200.0, 0.5);
    os << "2m exp(-c n / m) = " << p;
    return std::abs(p - 5.67e-7) < 0.01e-7 && condition_check(200, 26559, 1.0).satisfied;
  }));

  return out;
}

}  // namespace wls
