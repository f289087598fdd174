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

#include "datamarket/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace datamarket {

namespace {

constexpr double kIrTolerance = 1e-9;

void check_seller(const Market& market, Index seller) {
  if (seller < 0 || seller >= market.num_sellers()) {
    throw InvalidArgument("seller index " + std::to_string(seller) + " out of range");
  }
}

double social_cost_at(const Market& market, const CostVector& reported) {
  return social_welfare(market, market.solve(reported), market.true_costs()).social_cost;
}

}  // namespace

std::string_view to_string(Spacing spacing) {
  return spacing == Spacing::kLog ? "log" : "linear";
}

Spacing parse_spacing(std::string_view name) {
  if (name == "log") return Spacing::kLog;
  if (name == "linear") return Spacing::kLinear;
  throw InvalidArgument("unknown grid spacing '" + std::string(name) + "'");
}

void GridSpec::validate() const {
  std::vector<std::string> violations;
  if (!(low > 0.0) || !std::isfinite(low)) violations.push_back("grid low must be > 0");
  if (!(high > low) || !std::isfinite(high)) violations.push_back("grid high must exceed low");
  if (points < 2) violations.push_back("grid needs >= 2 points");
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

std::vector<double> GridSpec::points_for(double true_cost) const {
  validate();
  const double scale = relative ? true_cost : 1.0;
  const double lo = low * scale;
  const double hi = high * scale;
  if (!(lo > 0.0) || !std::isfinite(hi)) {
    throw InvalidArgument("a relative grid needs a finite true cost > 0");
  }
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double last = points - 1;
  for (int p = 0; p < points; ++p) {
    const double t = p / last;
    grid[static_cast<std::size_t>(p)] =
        spacing == Spacing::kLog ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

SweepPointError::SweepPointError(const Error& cause, double reported_cost)
    : Error(std::string(cause.what()) + " (at reported cost " +
            std::to_string(reported_cost) + ")"),
      kind_(cause.kind()),
      reported_cost_(reported_cost) {}

std::vector<SweepRecord> misreport_sweep(const Market& market, Rule rule, Index seller,
                                         const std::vector<double>& grid,
                                         const PaymentOptions& options) {
  check_seller(market, seller);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (!(grid[p] > 0.0) || !std::isfinite(grid[p])) {
      throw InvalidArgument("sweep grid points must be finite and > 0");
    }
    if (p > 0 && !(grid[p] > grid[p - 1])) {
      throw InvalidArgument("sweep grid must be strictly ascending");
    }
  }
  const CostVector& truth = market.true_costs();
  const double cost = truth[seller];
  PaymentOptions inner = options;
  inner.execution = Execution::kSerial;
  std::vector<SweepRecord> records(grid.size());
  for_each_index(static_cast<Index>(grid.size()), options.execution, [&](Index p) {
    const double u = grid[static_cast<std::size_t>(p)];
    try {
      const CostVector reported = truth.with(seller, u);
      const Allocation w = market.solve(reported);
      const WelfareReport welfare = social_welfare(market, w, truth);
      SweepRecord& r = records[static_cast<std::size_t>(p)];
      r.reported_cost = u;
      r.payment = seller_payment(market, rule, reported, seller, inner);
      r.sharing = welfare.per_seller_sharing[static_cast<std::size_t>(seller)];
      r.utility = r.payment - (r.sharing == 0.0 ? 0.0 : cost * r.sharing);
      r.social_cost = welfare.social_cost;
      double others = 0.0;
      for (std::size_t k = 0; k < welfare.per_seller_sharing.size(); ++k) {
        if (static_cast<Index>(k) != seller) others += welfare.per_seller_sharing[k];
      }
      r.other_sharing = others;
    } catch (const Error& e) {
      throw SweepPointError(e, u);
    }
  });
  return records;
}

double best_response(const std::vector<SweepRecord>& sweep, double true_cost) {
  if (sweep.empty()) throw InvalidArgument("empty sweep");
  double top = -std::numeric_limits<double>::infinity();
  for (const SweepRecord& r : sweep) top = std::max(top, r.utility);
  const double tol = 1e-12 * (1.0 + std::abs(top));
  const SweepRecord* best = nullptr;
  for (const SweepRecord& r : sweep) {
    if (r.utility < top - tol) continue;
    if (best == nullptr || std::abs(r.reported_cost - true_cost) <
                               std::abs(best->reported_cost - true_cost)) {
      best = &r;
    }
  }
  return best->reported_cost;
}

double best_response(const Market& market, Rule rule, Index seller, const GridSpec& grid,
                     const PaymentOptions& options) {
  check_seller(market, seller);
  const double cost = market.true_costs()[seller];
  return best_response(
      misreport_sweep(market, rule, seller, grid.points_for(cost), options), cost);
}

double grid_step_at(const std::vector<double>& grid, double value) {
  if (grid.size() < 2) throw InvalidArgument("grid needs >= 2 points");
  const auto it = std::upper_bound(grid.begin(), grid.end(), value);
  std::size_t hi = static_cast<std::size_t>(it - grid.begin());
  hi = std::clamp<std::size_t>(hi, 1, grid.size() - 1);
  return grid[hi] - grid[hi - 1];
}

PoaReport price_of_anarchy(const Market& market, const std::vector<double>& best_responses) {
  if (static_cast<Index>(best_responses.size()) != market.num_sellers()) {
    throw ShapeMismatch("one best response per seller is required");
  }
  const CostVector& truth = market.true_costs();
  const double base = social_cost_at(market, truth);
  PoaReport report;
  report.poa = -std::numeric_limits<double>::infinity();
  report.best_responses = best_responses;
  for (Index j = 0; j < market.num_sellers(); ++j) {
    const double deviated =
        social_cost_at(market, truth.with(j, best_responses[static_cast<std::size_t>(j)]));
    double ratio;
    if (base > 0.0) {
      ratio = deviated / base;
    } else {
      ratio = deviated <= base ? 1.0 : std::numeric_limits<double>::infinity();
    }
    if (ratio > report.poa) {
      report.poa = ratio;
      report.worst_seller = j;
    }
  }
  if (report.poa == 1.0) {
    report.worst_seller = -1;
  }
  return report;
}

PoaReport price_of_anarchy(const Market& market, Rule rule, const GridSpec& grid,
                           const PaymentOptions& options) {
  std::vector<double> br(static_cast<std::size_t>(market.num_sellers()));
  for (Index j = 0; j < market.num_sellers(); ++j) {
    br[static_cast<std::size_t>(j)] = best_response(market, rule, j, grid, options);
  }
  return price_of_anarchy(market, br);
}

AuditVerdict audit_rule(const Market& market, Rule rule, const GridSpec& grid,
                        const PaymentOptions& options) {
  const CostVector& truth = market.true_costs();
  const std::size_t ns = static_cast<std::size_t>(market.num_sellers());
  AuditVerdict verdict;
  verdict.seed = market.seed();
  verdict.rule = rule;
  verdict.true_costs.assign(truth.values().begin(), truth.values().end());
  verdict.best_responses.resize(ns);
  verdict.truthful.resize(ns);
  for (std::size_t j = 0; j < ns; ++j) {
    const double cost = truth[static_cast<Index>(j)];
    const std::vector<double> points = grid.points_for(cost);
    const double br = best_response(
        misreport_sweep(market, rule, static_cast<Index>(j), points, options), cost);
    verdict.best_responses[j] = br;
    verdict.truthful[j] = std::abs(br - cost) <= grid_step_at(points, cost);
  }

  PaymentResult truthful = compute_payment(market, rule, truth, options);
  verdict.payments = truthful.seller_payments;
  verdict.seller_ir.resize(ns);
  for (std::size_t j = 0; j < ns; ++j) {
    verdict.seller_ir[j] = truthful.seller_utilities[j] >= -kIrTolerance;
  }
  if (market.domain() != Domain::kDiscrete) {
    try {
      attach_redistribution(market, truth, truthful);
      for (double u : *truthful.buyer_utilities) verdict.buyer_ir.push_back(u >= -kIrTolerance);
      verdict.budget_gap = truthful.budget_gap;
    } catch (const DegenerateRedistribution&) {
      verdict.buyer_ir.clear();
    }
  }

  const PoaReport poa = price_of_anarchy(market, verdict.best_responses);
  verdict.poa = poa.poa;
  verdict.poa_seller = poa.worst_seller;

  const Allocation profile = market.solve(CostVector(verdict.best_responses));
  verdict.collapsed = true;
  for (std::size_t j = 0; j < ns; ++j) {
    const double f = market.sharing(static_cast<Index>(j), profile);
    verdict.profile_sharing.push_back(f);
    if (f != 0.0) verdict.collapsed = false;
  }
  return verdict;
}

std::vector<AuditVerdict> mechanism_audit(const Market& market,
                                          const std::vector<Rule>& rules,
                                          const GridSpec& grid,
                                          const PaymentOptions& options) {
  std::vector<AuditVerdict> out;
  out.reserve(rules.size());
  for (Rule rule : rules) out.push_back(audit_rule(market, rule, grid, options));
  return out;
}

}  // namespace datamarket
