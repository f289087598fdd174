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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "datamarket/types.hpp"

namespace datamarket {

enum class Domain { kUnconstrained, kSimplex, kDiscrete };

std::string_view to_string(Domain domain);

class Market;

// Optimal allocation as a function of one seller's reported cost u with the
// other reports held fixed: u -> W*(u, c_{-j}). u may be kAbsent.
class CostPath {
 public:
  virtual ~CostPath() = default;
  virtual Allocation at(double u) const = 0;
  virtual double sharing_at(double u) const;

  Index seller() const { return seller_; }

 protected:
  CostPath(const Market& market, Index seller)
      : market_(market), seller_(seller) {}
  const Market& market_;
  Index seller_;
};

// Contract every market family fulfills. Implementations are immutable after
// construction; all const members may be called concurrently.
class Market {
 public:
  virtual ~Market() = default;

  virtual std::string_view family() const = 0;
  virtual Domain domain() const = 0;
  virtual Index num_buyers() const = 0;
  Index num_sellers() const { return true_costs_.size(); }

  // v_i(W): improvement of buyer i over its standalone loss. Zero at W = 0.
  virtual double performance(Index buyer, const Allocation& w) const = 0;
  // f_j(W) >= 0.
  virtual double sharing(Index seller, const Allocation& w) const = 0;
  // l_i(0), so that social cost = sum_i l_i(0) - SW.
  virtual double standalone_loss(Index buyer) const = 0;

  // W*(c): maximizer of the reported social welfare. Absent sellers get a
  // zero column.
  virtual Allocation solve(const CostVector& reported) const = 0;

  Allocation solve_subset(const std::vector<bool>& members,
                          const CostVector& reported) const;

  // The default path re-solves from scratch at every u.
  virtual std::unique_ptr<CostPath> cost_path(const CostVector& reported,
                                              Index seller) const;

  // False for sellers that can never receive a nonzero allocation (e.g.
  // documents outside the retrieved pool).
  virtual bool is_candidate(Index /*seller*/) const { return true; }

  const CostVector& true_costs() const { return true_costs_; }
  std::optional<std::uint64_t> seed() const { return seed_; }
  PlayerIds players() const { return {num_buyers(), num_sellers()}; }

 protected:
  Market(CostVector true_costs, std::optional<std::uint64_t> seed);

 private:
  CostVector true_costs_;
  std::optional<std::uint64_t> seed_;
};

// Markets whose welfare is differentiable in W; used by solve_numeric.
class ContinuousMarket : public Market {
 public:
  // Gradient of sum_i v_i(W) - sum_j c_j f_j(W) over non-absent columns.
  virtual Eigen::MatrixXd welfare_gradient(const Allocation& w,
                                           const CostVector& reported) const = 0;
  double reported_welfare(const Allocation& w, const CostVector& reported) const;

 protected:
  using Market::Market;
};

struct ContractDescription {
  std::string family;
  Domain domain = Domain::kUnconstrained;
  PlayerIds players;
};

// Probes a market against the contract (sizes, zero-allocation identities,
// solve() shape and non-negative sharing). Throws ContractViolation.
ContractDescription market_contract(const Market& market);

double total_performance(const Market& market, const Allocation& w);

// SW = sum_i v_i - sum_j c_j f_j and SC = sum_i l_i(0) - SW at `costs`.
WelfareReport social_welfare(const Market& market, const Allocation& w,
                             const CostVector& costs);

}  // namespace datamarket
