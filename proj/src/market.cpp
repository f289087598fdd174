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

#include "datamarket/market.hpp"

#include <cmath>

namespace datamarket {

namespace {

class ResolvingCostPath final : public CostPath {
 public:
  ResolvingCostPath(const Market& market, CostVector reported, Index seller)
      : CostPath(market, seller), reported_(std::move(reported)) {}

  Allocation at(double u) const override {
    return market_.solve(reported_.with(seller_, u));
  }

 private:
  CostVector reported_;
};

}  // namespace

std::string_view to_string(Domain domain) {
  switch (domain) {
    case Domain::kUnconstrained: return "unconstrained";
    case Domain::kSimplex: return "simplex-constrained";
    case Domain::kDiscrete: return "discrete";
  }
  return "unknown";
}

double CostPath::sharing_at(double u) const {
  return market_.sharing(seller_, at(u));
}

Market::Market(CostVector true_costs, std::optional<std::uint64_t> seed)
    : true_costs_(std::move(true_costs)), seed_(seed) {
  if (true_costs_.size() < 1) {
    throw InvalidArgument("a market needs at least one seller");
  }
}

Allocation Market::solve_subset(const std::vector<bool>& members,
                                const CostVector& reported) const {
  return solve(reported.restricted_to(members));
}

std::unique_ptr<CostPath> Market::cost_path(const CostVector& reported,
                                            Index seller) const {
  return std::make_unique<ResolvingCostPath>(*this, reported, seller);
}

double ContinuousMarket::reported_welfare(const Allocation& w,
                                          const CostVector& reported) const {
  double sw = total_performance(*this, w);
  for (Index j = 0; j < num_sellers(); ++j) {
    if (reported.absent(j)) continue;
    sw -= reported[j] * sharing(j, w);
  }
  return sw;
}

double total_performance(const Market& market, const Allocation& w) {
  double total = 0.0;
  for (Index i = 0; i < market.num_buyers(); ++i) total += market.performance(i, w);
  return total;
}

WelfareReport social_welfare(const Market& market, const Allocation& w,
                             const CostVector& costs) {
  const Index nb = market.num_buyers();
  const Index ns = market.num_sellers();
  if (w.buyers() != nb || w.sellers() != ns) {
    throw ShapeMismatch("allocation is " + std::to_string(w.buyers()) + "x" +
                        std::to_string(w.sellers()) + ", market expects " +
                        std::to_string(nb) + "x" + std::to_string(ns));
  }
  if (costs.size() != ns) {
    throw ShapeMismatch("cost vector has " + std::to_string(costs.size()) +
                        " entries, market has " + std::to_string(ns) + " sellers");
  }
  WelfareReport report;
  report.per_buyer_value.resize(static_cast<std::size_t>(nb));
  report.per_seller_sharing.resize(static_cast<std::size_t>(ns));
  report.per_seller_cost.resize(static_cast<std::size_t>(ns));
  double value = 0.0;
  double standalone = 0.0;
  for (Index i = 0; i < nb; ++i) {
    const double v = market.performance(i, w);
    report.per_buyer_value[static_cast<std::size_t>(i)] = v;
    value += v;
    standalone += market.standalone_loss(i);
  }
  double cost = 0.0;
  for (Index j = 0; j < ns; ++j) {
    const double f = market.sharing(j, w);
    report.per_seller_sharing[static_cast<std::size_t>(j)] = f;
    // An absent seller shares nothing and so costs nothing.
    const double c = (f == 0.0) ? 0.0 : costs[j] * f;
    report.per_seller_cost[static_cast<std::size_t>(j)] = c;
    cost += c;
  }
  report.social_welfare = value - cost;
  report.social_cost = standalone - report.social_welfare;
  return report;
}

ContractDescription market_contract(const Market& market) {
  ContractDescription out;
  out.family = std::string(market.family());
  out.domain = market.domain();
  const Index nb = market.num_buyers();
  const Index ns = market.num_sellers();
  if (nb < 1 || ns < 1) {
    throw ContractViolation(out.family + " market needs >= 1 buyer and seller");
  }
  if (out.domain == Domain::kDiscrete && nb != 1) {
    throw ContractViolation("discrete markets have exactly one buyer");
  }
  out.players = PlayerIds(nb, ns);
  const Allocation zero = Allocation::zeros(nb, ns);
  for (Index i = 0; i < nb; ++i) {
    if (std::abs(market.performance(i, zero)) > 1e-12) {
      throw ContractViolation("performance of buyer " + std::to_string(i) +
                              " at the zero allocation is not 0");
    }
  }
  for (Index j = 0; j < ns; ++j) {
    if (market.sharing(j, zero) != 0.0) {
      throw ContractViolation("sharing of seller " + std::to_string(j) +
                              " at the zero allocation is not 0");
    }
  }
  const Allocation w = market.solve(market.true_costs());
  if (w.buyers() != nb || w.sellers() != ns) {
    throw ContractViolation("solve() returned an allocation of the wrong shape");
  }
  for (Index j = 0; j < ns; ++j) {
    const double f = market.sharing(j, w);
    if (!std::isfinite(f) || f < 0.0) {
      throw ContractViolation("sharing of seller " + std::to_string(j) +
                              " at the optimum is not finite and >= 0");
    }
  }
  return out;
}

}  // namespace datamarket
