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
#include <optional>
#include <vector>

#include "datamarket/kernels.hpp"
#include "datamarket/market.hpp"
#include "datamarket/types.hpp"

namespace datamarket {

struct IntegratorSettings {
  double relative_tolerance = 1e-6;
  double tail_cutoff = 1e-9;  // stop extending the range once f_j < cutoff
  // Hard cap on the integration variable; 1e6 x the largest finite reported
  // cost when unset.
  std::optional<double> max_upper_limit;

  void validate() const;
};

struct ShapleyMode {
  enum class Kind { kExact, kSampled };
  Kind kind = Kind::kExact;
  int permutations = 2000;
  std::uint64_t seed = 0;

  static ShapleyMode exact() { return {}; }
  static ShapleyMode sampled(int permutations, std::uint64_t seed) {
    return {Kind::kSampled, permutations, seed};
  }
};

// Exact enumeration refuses more candidate sellers than this.
inline constexpr int kMaxExactShapleySellers = 20;

// Threshold cost above which seller j drops out of the discrete selection.
// `value` is empty when j is not selected even at zero cost.
struct CriticalCost {
  Index seller = 0;
  std::optional<double> value;
};

struct PaymentOptions {
  ShapleyMode shapley;
  IntegratorSettings integrator;
  Execution execution = Execution::kParallel;
};

// P_j = c_j f_j(W*(c)).
PaymentResult direct_payment(const Market& market, const CostVector& reported,
                             Execution execution = Execution::kParallel);

// P_j = sum_i v_i(W*(c)) - sum_i v_i(W*(inf, c_-j)).
PaymentResult loo_payment(const Market& market, const CostVector& reported,
                          Execution execution = Execution::kParallel);

// Marginal contribution averaged over coalitions of candidate sellers, each
// coalition valued at its members' reported costs. Non-candidates get 0.
// Exact mode throws SizeRefusal above kMaxExactShapleySellers candidates.
PaymentResult shapley_payment(const Market& market, const CostVector& reported,
                              const ShapleyMode& mode = {},
                              Execution execution = Execution::kParallel);

// P_j = c_j f_j(c) + int_{c_j}^inf f_j(W*(u, c_-j)) du.
PaymentResult myerson_payment(const Market& market, const CostVector& reported,
                              const IntegratorSettings& settings = {},
                              Execution execution = Execution::kParallel);

// Externality on everyone else:
//   [sum_i v_i(W*) - sum_{k != j} c_k f_k(W*)]
//     - [sum_i v_i(W*_-j) - sum_{k != j} c_k f_k(W*_-j)].
PaymentResult vcg_payment(const Market& market, const CostVector& reported,
                          Execution execution = Execution::kParallel);

// sum_i [v_i(W*(c)) - v_i(W*(c) with column j zeroed)] per seller.
std::vector<double> vcg_upper_bound(const Market& market, const CostVector& costs);

// Bisection on [0, 10] to 1e-9 for the largest report at which seller j is
// still selected. Discrete markets only.
CriticalCost critical_cost(const Market& market, Index seller,
                           const CostVector& reported);

// Selected sellers are paid their critical cost, the rest nothing.
PaymentResult myerson_discrete(const Market& market, const CostVector& reported,
                               Execution execution = Execution::kParallel);

// Per-buyer share of each seller payment, eta_ij = d_ij / sum_k d_kj with
// d_ij = v_i(W*) - v_i(W* with column j zeroed). Returns |B| x |S| transfers.
// Throws DegenerateRedistribution when sum_k d_kj = 0 but P_j != 0.
Eigen::MatrixXd redistribution_shares(const Market& market, const CostVector& costs,
                                      const std::vector<double>& seller_payments);

// Buyer charges P_i = sum_j eta_ij P_j.
std::vector<double> redistribute(const Market& market, const CostVector& costs,
                                 const std::vector<double>& seller_payments);

// Fills buyer charges, buyer utilities and the budget gap of `result`.
void attach_redistribution(const Market& market, const CostVector& costs,
                           PaymentResult& result);

// Dispatches on the rule; Myerson on a discrete market uses the critical
// cost.
PaymentResult compute_payment(const Market& market, Rule rule, const CostVector& reported,
                              const PaymentOptions& options = {});

// Payment to one seller under `rule`; used by sweeps so that only the
// deviating seller is priced. Agrees with compute_payment entry j.
double seller_payment(const Market& market, Rule rule, const CostVector& reported,
                      Index seller, const PaymentOptions& options = {});

// ---------------------------------------------------------------------------
// Probes

enum class Additivity { kSubadditive, kSuperadditive, kAdditive, kMixed, kInconclusive };

std::string_view to_string(Additivity additivity);

struct AdditivityProbe {
  Additivity verdict = Additivity::kInconclusive;
  // Largest violation of diminishing returns and of increasing returns.
  double submodular_gap = 0.0;
  double supermodular_gap = 0.0;
};

inline constexpr int kMaxProbeSellers = 12;

// Exhaustive check of F(m + j) + F(m + k) >= F(m + j + k) + F(m) over every
// coalition m of candidate sellers, F = total buyer performance. Diminishing
// returns everywhere is reported as subadditive, increasing returns as
// superadditive. Inconclusive above kMaxProbeSellers candidates.
AdditivityProbe coalition_additivity_probe(const Market& market, const CostVector& reported,
                                           double tolerance = 1e-9,
                                           Execution execution = Execution::kParallel);

struct RedistributionProbe {
  bool passes = false;
  // v_i(W*) - sum_j max(d_ij, 0) per buyer.
  std::vector<double> slack;
};

// Per buyer, the summed column-removal losses do not exceed the buyer's
// value at the optimum. When this holds, any payments bounded by
// vcg_upper_bound leave every buyer with non-negative utility after
// redistribution.
RedistributionProbe redistribution_probe(const Market& market, const CostVector& costs,
                                         double tolerance = 1e-9);

}  // namespace datamarket
