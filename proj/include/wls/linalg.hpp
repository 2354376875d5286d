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
#include <limits>

#include "wls/error.hpp"

namespace wls {

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns, empty unless requested
  int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for symmetric matrices. Sweeps over all (p, q)
/// pairs with the stable Rutishauser rotation until the off-diagonal Frobenius
/// norm falls below tol * ||A||_F.
inline SymmetricEigen jacobi_eigen(Eigen::MatrixXd a, bool compute_vectors,
                                   double tol = 1e-12, int max_sweeps = 100) {
  if (a.rows() != a.cols()) throw structural_error("jacobi_eigen: matrix not square");
  const Eigen::Index n = a.rows();
  SymmetricEigen result;
  if (compute_vectors) result.vectors = Eigen::MatrixXd::Identity(n, n);
  const double frob = a.norm();
  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index q = 1; q < n; ++q) {
      for (Eigen::Index p = 0; p < q; ++p) s += a(p, q) * a(p, q);
    }
    return std::sqrt(2.0 * s);
  };
  double* data = a.data();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off_norm() <= tol * frob || frob == 0.0) break;
    ++result.sweeps;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        double t = std::abs(theta) > 1e150
                       ? 0.5 / std::abs(theta)
                       : 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        double* col_p = data + p * n;
        double* col_q = data + q * n;
        for (Eigen::Index r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = col_p[r];
          const double arq = col_q[r];
          const double new_rp = arp - s * (arq + tau * arp);
          const double new_rq = arq + s * (arp - tau * arq);
          col_p[r] = new_rp;
          col_q[r] = new_rq;
          data[r * n + p] = new_rp;
          data[r * n + q] = new_rq;
        }
        if (compute_vectors) {
          double* vp = result.vectors.data() + p * n;
          double* vq = result.vectors.data() + q * n;
          for (Eigen::Index r = 0; r < n; ++r) {
            const double xp = vp[r];
            const double xq = vq[r];
            vp[r] = xp - s * (xq + tau * xp);
            vq[r] = xq + s * (xp - tau * xq);
          }
        }
      }
    }
  }
  result.values = a.diagonal();
  // Sort ascending, permuting vectors alongside.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return result.values[x] < result.values[y];
  });
  Eigen::VectorXd sorted(n);
  Eigen::MatrixXd sorted_vectors;
  if (compute_vectors) sorted_vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sorted[i] = result.values[order[static_cast<std::size_t>(i)]];
    if (compute_vectors) {
      sorted_vectors.col(i) = result.vectors.col(order[static_cast<std::size_t>(i)]);
    }
  }
  result.values = std::move(sorted);
  if (compute_vectors) result.vectors = std::move(sorted_vectors);
  return result;
}

/// Exact symmetry up to a relative tolerance on the largest entry.
inline bool is_symmetric(const Eigen::MatrixXd& a, double rel_tol = 1e-12) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

}  // namespace wls
