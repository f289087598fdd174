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
#include <string>
#include <vector>

#include "datamarket/kernels.hpp"
#include "datamarket/market.hpp"
#include "datamarket/payments.hpp"

namespace datamarket {

enum class Spacing { kLog, kLinear };

std::string_view to_string(Spacing spacing);
Spacing parse_spacing(std::string_view name);

// Grid of reported costs for one seller. When `relative` is set, low and
// high are multiples of the seller's true cost.
struct GridSpec {
  double low = 0.1;
  double high = 10.0;
  int points = 100;
  Spacing spacing = Spacing::kLog;
  bool relative = true;

  void validate() const;
  std::vector<double> points_for(double true_cost) const;
};

struct SweepRecord {
  double reported_cost = 0.0;
  double payment = 0.0;
  double utility = 0.0;      // payment - c_j f_j at the true c_j
  double social_cost = 0.0;  // at true costs
  double sharing = 0.0;      // f_j
  double other_sharing = 0.0;
};

// A failure at one grid point. kind() is the kind of the underlying error.
class SweepPointError : public Error {
 public:
  SweepPointError(const Error& cause, double reported_cost);
  std::string_view kind() const override { return kind_; }
  double reported_cost() const { return reported_cost_; }

 private:
  std::string kind_;
  double reported_cost_;
};

// One record per grid point, seller `seller` reporting the grid point and
// everyone else truthful.
std::vector<SweepRecord> misreport_sweep(const Market& market, Rule rule, Index seller,
                                         const std::vector<double>& grid,
                                         const PaymentOptions& options = {});

// Utility maximizer of a sweep; near-ties go to the point nearest true_cost.
double best_response(const std::vector<SweepRecord>& sweep, double true_cost);
double best_response(const Market& market, Rule rule, Index seller, const GridSpec& grid,
                     const PaymentOptions& options = {});

// Width of the grid interval containing `value` (nearest interval when
// outside the grid).
double grid_step_at(const std::vector<double>& grid, double value);

struct PoaReport {
  double poa = 1.0;
  Index worst_seller = -1;  // -1 when every deviation leaves the social cost unchanged
  std::vector<double> best_responses;
};

// max_j SC(W*(BR_j, c_-j)) / SC(W*(c)), both at true costs.
PoaReport price_of_anarchy(const Market& market, Rule rule, const GridSpec& grid,
                           const PaymentOptions& options = {});
// Same ratio from known unilateral best responses.
PoaReport price_of_anarchy(const Market& market, const std::vector<double>& best_responses);

struct AuditVerdict {
  std::optional<std::uint64_t> seed;
  Rule rule = Rule::kDirect;
  std::vector<double> true_costs;
  std::vector<double> best_responses;
  std::vector<bool> truthful;   // |BR - c_j| <= grid step at c_j
  std::vector<double> payments;  // at truthful reports
  std::vector<bool> seller_ir;  // u_j >= -1e-9 at truthful reports
  std::vector<bool> buyer_ir;   // after redistribution; empty for discrete markets
  std::optional<double> budget_gap;
  double poa = 1.0;
  Index poa_seller = -1;
  // Allocation with every seller at its unilateral best response.
  std::vector<double> profile_sharing;
  bool collapsed = false;  // nothing allocated at that profile
};

AuditVerdict audit_rule(const Market& market, Rule rule, const GridSpec& grid,
                        const PaymentOptions& options = {});
std::vector<AuditVerdict> mechanism_audit(const Market& market,
                                          const std::vector<Rule>& rules,
                                          const GridSpec& grid,
                                          const PaymentOptions& options = {});

}  // namespace datamarket
