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

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "datamarket/market.hpp"

namespace datamarket {

// Every parallel kernel has a serial twin with identical results; the serial
// versions are the reference the tests compare against.
enum class Execution { kSerial, kParallel };

// Calls body(i) for i in [0, n). In parallel mode iterations are distributed
// over OpenMP threads; if any iteration throws, the exception from the lowest
// failing index is rethrown after the loop.
void for_each_index(Index n, Execution execution,
                    const std::function<void(Index)>& body);

// Total buyer performance sum_i v_i(W*) of every coalition of `players`
// (bit b of the mask selects players[b]), each solved at the members'
// reported costs with everyone else absent.
std::vector<double> coalition_values(const Market& market, const CostVector& reported,
                                     const std::vector<Index>& players,
                                     Execution execution);

// Exact Shapley values from a coalition table over n players.
std::vector<double> shapley_from_table(const std::vector<double>& values, int n);

struct ShapleyEstimate {
  std::vector<double> mean;
  std::vector<double> standard_error;  // sample sd / sqrt(permutations)
};

// Permutation-sampling Shapley estimate over `players`. Permutation p is
// drawn from Rng(derive_seed(seed, p)), so the estimate does not depend on
// the thread count.
ShapleyEstimate sampled_shapley(const Market& market, const CostVector& reported,
                                const std::vector<Index>& players, int permutations,
                                std::uint64_t seed, Execution execution);

int max_threads();

}  // namespace datamarket
