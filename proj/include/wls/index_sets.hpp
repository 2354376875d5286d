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
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wls/error.hpp"
#include "wls/random.hpp"

namespace wls {

/// A multi-index nu in N_0^d.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t dimension) : degrees_(dimension, 0) {}
  MultiIndex(std::initializer_list<int> degrees) : degrees_(degrees) {
    validate();
  }
  explicit MultiIndex(std::vector<int> degrees) : degrees_(std::move(degrees)) {
    validate();
  }

  std::size_t dimension() const { return degrees_.size(); }
  int operator[](std::size_t i) const { return degrees_[i]; }
  int& operator[](std::size_t i) { return degrees_[i]; }
  const std::vector<int>& degrees() const { return degrees_; }

  int total_degree() const {
    return std::accumulate(degrees_.begin(), degrees_.end(), 0);
  }

  bool is_zero() const {
    return std::all_of(degrees_.begin(), degrees_.end(),
                       [](int v) { return v == 0; });
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  void validate() const {
    for (int v : degrees_) {
      if (v < 0) throw structural_error("multi-index with negative entry");
    }
  }

  std::vector<int> degrees_;
};

/// Lexicographic order read from the last coordinate, so that in d = 2 the
/// set {(0,0),(1,0),(0,1)} is listed in exactly that order.
struct ReverseLexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    for (std::size_t i = a.dimension(); i-- > 0;) {
      if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
  }
};

/// Total degree first, ties broken by ReverseLexLess.
struct GradedLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    const int da = a.total_degree();
    const int db = b.total_degree();
    if (da != db) return da < db;
    return ReverseLexLess{}(a, b);
  }
};

/// True iff every componentwise-smaller index of each member is a member.
/// Throws structural_error when the indices do not share one dimension.
inline bool is_downward_closed(std::span<const MultiIndex> candidate) {
  if (candidate.empty()) return true;
  const std::size_t d = candidate.front().dimension();
  for (const auto& nu : candidate) {
    if (nu.dimension() != d) {
      throw structural_error("is_downward_closed: mixed dimensions");
    }
  }
  const std::set<MultiIndex, ReverseLexLess> members(candidate.begin(),
                                                     candidate.end());
  // Closure under single backward steps implies full downward closure.
  for (const auto& nu : members) {
    for (std::size_t i = 0; i < d; ++i) {
      if (nu[i] == 0) continue;
      MultiIndex below = nu;
      --below[i];
      if (!members.contains(below)) return false;
    }
  }
  return true;
}

/// Componentwise maxima lambda_j and their maximum lambda_Lambda.
struct DegreeProfile {
  std::vector<int> per_dimension;
  int overall = 0;
};

/// A downward-closed multi-index set with a fixed (reverse-lex) ordering.
class IndexSet {
 public:
  IndexSet(std::size_t dimension, std::vector<MultiIndex> members)
      : dimension_(dimension), members_(std::move(members)) {
    if (dimension_ == 0) throw structural_error("IndexSet: dimension 0");
    if (members_.empty()) throw structural_error("IndexSet: empty");
    for (const auto& nu : members_) {
      if (nu.dimension() != dimension_) {
        throw structural_error("IndexSet: member dimension mismatch");
      }
    }
    std::sort(members_.begin(), members_.end(), ReverseLexLess{});
    if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
      throw structural_error("IndexSet: duplicate members");
    }
    if (!is_downward_closed(members_)) {
      throw structural_error("IndexSet: not downward closed");
    }
  }

  /// {0, 1, ..., m-1} in one dimension.
  static IndexSet univariate(std::size_t m) {
    std::vector<MultiIndex> members;
    for (std::size_t j = 0; j < m; ++j) {
      members.push_back(MultiIndex({static_cast<int>(j)}));
    }
    return IndexSet(1, std::move(members));
  }

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return members_.size(); }
  const MultiIndex& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<MultiIndex>& members() const { return members_; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  bool contains(const MultiIndex& nu) const {
    return std::binary_search(members_.begin(), members_.end(), nu,
                              ReverseLexLess{});
  }

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::size_t dimension_;
  std::vector<MultiIndex> members_;
};

inline DegreeProfile degree_profile(const IndexSet& set) {
  DegreeProfile profile;
  profile.per_dimension.assign(set.dimension(), 0);
  for (const auto& nu : set) {
    for (std::size_t i = 0; i < set.dimension(); ++i) {
      profile.per_dimension[i] = std::max(profile.per_dimension[i], nu[i]);
    }
  }
  profile.overall = *std::max_element(profile.per_dimension.begin(),
                                      profile.per_dimension.end());
  return profile;
}

enum class SequenceStrategy { total_degree_lex, random_admissible };

inline SequenceStrategy sequence_strategy_from_name(std::string_view name) {
  if (name == "total_degree_lex") return SequenceStrategy::total_degree_lex;
  if (name == "random_admissible") return SequenceStrategy::random_admissible;
  throw std::invalid_argument("unknown index-set strategy: " + std::string(name));
}

inline std::string_view to_string(SequenceStrategy s) {
  return s == SequenceStrategy::total_degree_lex ? "total_degree_lex"
                                                 : "random_admissible";
}

/// Lambda_1 = {0} subset Lambda_2 subset ... subset Lambda_{m_max}, each set
/// obtained by adding one admissible index (one whose backward neighbours are
/// all present). total_degree_lex takes the GradedLess-smallest admissible
/// index; random_admissible picks uniformly among them with a seeded stream.
inline std::vector<IndexSet> nested_sequence(std::size_t d, std::size_t m_max,
                                             SequenceStrategy strategy,
                                             std::uint64_t seed = 0) {
  if (d == 0 || m_max == 0) {
    throw std::invalid_argument("nested_sequence: d and m_max must be >= 1");
  }
  std::set<MultiIndex, ReverseLexLess> members;
  std::set<MultiIndex, GradedLess> admissible;
  std::vector<MultiIndex> order;

  auto add = [&](const MultiIndex& nu) {
    members.insert(nu);
    order.push_back(nu);
    admissible.erase(nu);
    for (std::size_t i = 0; i < d; ++i) {
      MultiIndex up = nu;
      ++up[i];
      bool ok = true;
      for (std::size_t k = 0; k < d && ok; ++k) {
        if (up[k] == 0) continue;
        MultiIndex below = up;
        --below[k];
        ok = members.contains(below);
      }
      if (ok) admissible.insert(up);
    }
  };

  std::vector<IndexSet> sequence;
  sequence.reserve(m_max);
  add(MultiIndex(d));
  sequence.emplace_back(d, order);
  CounterStream stream(seed, 0x1de5u);
  while (sequence.size() < m_max) {
    auto pick = admissible.begin();
    if (strategy == SequenceStrategy::random_admissible) {
      const auto count = static_cast<double>(admissible.size());
      auto offset = static_cast<std::size_t>(stream.uniform() * count);
      offset = std::min(offset, admissible.size() - 1);
      std::advance(pick, static_cast<std::ptrdiff_t>(offset));
    }
    const MultiIndex next = *pick;
    add(next);
    sequence.emplace_back(d, order);
  }
  return sequence;
}

}  // namespace wls
