// Copyright 2026 The datamarket Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Shared fixtures and brute-force reference computations for the tests.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "datamarket/market_io.hpp"
#include "datamarket/markets.hpp"

namespace datamarket::testing {

inline std::string fixture(const std::string& name) {
  return std::string(DATAMARKET_FIXTURE_DIR) + "/" + name;
}

inline std::unique_ptr<Market> load_fixture(const std::string& name) {
  return load_market(fixture(name));
}

inline bool close(double a, double b, double abs_tol, double rel_tol = 0.0) {
  return std::abs(a - b) <= std::max(abs_tol, rel_tol * std::max(std::abs(a), std::abs(b)));
}

// Retrieval market over documents d1..dn with the whole corpus in the pool.
inline RetrievalMarket table_market(std::map<std::vector<Index>, double> entries,
                                    std::vector<double> costs, Index budget,
                                    bool independence = false,
                                    std::optional<std::vector<double>> relevance = {}) {
  const Index n = static_cast<Index>(costs.size());
  DocumentIds ids = DocumentIds::numbered(n);
  std::vector<double> rel;
  if (relevance) {
    rel = *relevance;
  } else {
    for (Index i = 0; i < n; ++i) rel.push_back(1.0 - 0.01 * static_cast<double>(i));
  }
  auto oracle = std::make_shared<TableScoreOracle>(std::move(entries), ids, independence);
  return RetrievalMarket(std::move(rel), n, budget, CostVector(std::move(costs)),
                         std::move(oracle), std::move(ids));
}

// Best subset of at most k candidates under additive welfare, by enumeration.
inline std::vector<bool> brute_force_selection(const std::vector<double>& gains,
                                               const std::vector<double>& costs, Index k) {
  const std::size_t n = gains.size();
  double best = 0.0;
  std::uint64_t best_mask = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    if (std::popcount(mask) > k) continue;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1U) total += gains[i] - costs[i];
    }
    if (total > best + 1e-12) {
      best = total;
      best_mask = mask;
    }
  }
  std::vector<bool> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (best_mask >> i & 1U) != 0;
  return out;
}

// Shapley values by enumerating every ordering of the players.
template <class ValueFn>
std::vector<double> permutation_shapley(int n, ValueFn value) {
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::vector<double> phi(static_cast<std::size_t>(n), 0.0);
  double count = 0.0;
  do {
    std::uint64_t mask = 0;
    double previous = value(mask);
    for (int p : order) {
      mask |= std::uint64_t{1} << p;
      const double current = value(mask);
      phi[static_cast<std::size_t>(p)] += current - previous;
      previous = current;
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& v : phi) v /= count;
  return phi;
}

}  // namespace datamarket::testing
