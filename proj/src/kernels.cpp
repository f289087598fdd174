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

#include "datamarket/kernels.hpp"

#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "datamarket/rng.hpp"

namespace datamarket {

void for_each_index(Index n, Execution execution,
                    const std::function<void(Index)>& body) {
  if (execution == Execution::kSerial || n <= 1) {
    for (Index i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (Index i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

double coalition_value(const Market& market, const CostVector& reported,
                       const std::vector<Index>& players, std::uint64_t mask) {
  std::vector<bool> members(static_cast<std::size_t>(market.num_sellers()), false);
  bool any = false;
  for (std::size_t b = 0; b < players.size(); ++b) {
    if (mask >> b & 1U) {
      members[static_cast<std::size_t>(players[b])] = true;
      any = true;
    }
  }
  if (!any) return 0.0;
  return total_performance(market, market.solve_subset(members, reported));
}

}  // namespace

std::vector<double> coalition_values(const Market& market, const CostVector& reported,
                                     const std::vector<Index>& players,
                                     Execution execution) {
  if (players.size() >= 63) throw SizeRefusal("too many players for a coalition table");
  const Index count = Index{1} << players.size();
  std::vector<double> values(static_cast<std::size_t>(count));
  for_each_index(count, execution, [&](Index mask) {
    values[static_cast<std::size_t>(mask)] =
        coalition_value(market, reported, players, static_cast<std::uint64_t>(mask));
  });
  return values;
}

std::vector<double> shapley_from_table(const std::vector<double>& values, int n) {
  if (values.size() != (std::size_t{1} << n)) {
    throw ShapeMismatch("coalition table size does not match 2^n");
  }
  // weight[s] = s! (n - s - 1)! / n!
  std::vector<double> weight(static_cast<std::size_t>(std::max(n, 1)));
  for (int s = 0; s < n; ++s) {
    weight[static_cast<std::size_t>(s)] =
        std::exp(std::lgamma(s + 1.0) + std::lgamma(n - s + 0.0) - std::lgamma(n + 1.0));
  }
  std::vector<double> phi(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    const std::uint64_t bit = std::uint64_t{1} << j;
    double total = 0.0;
    for (std::uint64_t mask = 0; mask < values.size(); ++mask) {
      if (mask & bit) continue;
      const int s = std::popcount(mask);
      total += weight[static_cast<std::size_t>(s)] * (values[mask | bit] - values[mask]);
    }
    phi[static_cast<std::size_t>(j)] = total;
  }
  return phi;
}

ShapleyEstimate sampled_shapley(const Market& market, const CostVector& reported,
                                const std::vector<Index>& players, int permutations,
                                std::uint64_t seed, Execution execution) {
  if (permutations < 2) throw InvalidArgument("sampled Shapley needs >= 2 permutations");
  const std::size_t n = players.size();
  // marginals[p * n + b]: contribution of players[b] in permutation p.
  std::vector<double> marginals(static_cast<std::size_t>(permutations) * n, 0.0);
  for_each_index(permutations, execution, [&](Index p) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(p)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order.begin(), order.end());
    std::vector<bool> members(static_cast<std::size_t>(market.num_sellers()), false);
    double previous = 0.0;
    for (std::size_t b : order) {
      members[static_cast<std::size_t>(players[b])] = true;
      const double current =
          total_performance(market, market.solve_subset(members, reported));
      marginals[static_cast<std::size_t>(p) * n + b] = current - previous;
      previous = current;
    }
  });
  ShapleyEstimate out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  const double m = permutations;
  for (std::size_t b = 0; b < n; ++b) {
    double sum = 0.0;
    for (int p = 0; p < permutations; ++p) sum += marginals[static_cast<std::size_t>(p) * n + b];
    const double mean = sum / m;
    double ss = 0.0;
    for (int p = 0; p < permutations; ++p) {
      const double d = marginals[static_cast<std::size_t>(p) * n + b] - mean;
      ss += d * d;
    }
    out.mean[b] = mean;
    out.standard_error[b] = std::sqrt(ss / (m - 1.0)) / std::sqrt(m);
  }
  return out;
}

}  // namespace datamarket
