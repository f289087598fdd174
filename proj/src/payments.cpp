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

#include "datamarket/payments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace datamarket {

namespace {

constexpr double kCriticalTolerance = 1e-9;
constexpr double kMaxJudgeScore = 10.0;

void check_costs(const Market& market, const CostVector& costs) {
  if (costs.size() != market.num_sellers()) {
    throw ShapeMismatch("cost vector has " + std::to_string(costs.size()) +
                        " entries, market has " + std::to_string(market.num_sellers()) +
                        " sellers");
  }
}

double cost_term(double cost, double sharing) {
  return sharing == 0.0 ? 0.0 : cost * sharing;
}

PaymentResult finish(const Market& market, Rule rule, const Allocation& w,
                     std::vector<double> payments) {
  PaymentResult result;
  result.rule = rule;
  result.welfare = social_welfare(market, w, market.true_costs());
  result.seller_utilities.resize(payments.size());
  for (std::size_t j = 0; j < payments.size(); ++j) {
    result.seller_utilities[j] = payments[j] - result.welfare.per_seller_cost[j];
  }
  result.seller_payments = std::move(payments);
  return result;
}

// Sellers that can be allocated anything at these reports.
std::vector<Index> candidates(const Market& market, const CostVector& reported) {
  std::vector<Index> out;
  for (Index j = 0; j < market.num_sellers(); ++j) {
    if (market.is_candidate(j) && !reported.absent(j)) out.push_back(j);
  }
  return out;
}

double others_welfare(const Market& market, const Allocation& w,
                      const CostVector& reported, Index seller) {
  double value = total_performance(market, w);
  for (Index k = 0; k < market.num_sellers(); ++k) {
    if (k == seller || reported.absent(k)) continue;
    value -= cost_term(reported[k], market.sharing(k, w));
  }
  return value;
}

struct MyersonTerm {
  double payment = 0.0;
  double error = 0.0;
  bool truncated = false;
};

double upper_limit(const CostVector& reported, const IntegratorSettings& settings) {
  if (settings.max_upper_limit) return *settings.max_upper_limit;
  const double top = reported.max_finite();
  return top > 0.0 ? 1e6 * top : 1e6;
}

MyersonTerm myerson_term(const Market& market, const CostVector& reported, Index j,
                         double f0, const IntegratorSettings& settings) {
  MyersonTerm term;
  if (reported.absent(j) || f0 == 0.0) return term;
  const double c = reported[j];
  const double cap = upper_limit(reported, settings);
  term.payment = c * f0;
  if (!(cap > c)) {
    term.truncated = f0 >= settings.tail_cutoff;
    return term;
  }
  const auto path = market.cost_path(reported, j);
  const auto f = [&](double u) { return path->sharing_at(u); };

  const double scale = std::max(c, 1e-6 * cap);
  double span = scale;
  double upper = std::min(c + span, cap);
  double f_upper = f(upper);
  while (f_upper >= settings.tail_cutoff && upper < cap) {
    span *= 2.0;
    upper = std::min(c + span, cap);
    f_upper = f(upper);
  }
  term.truncated = f_upper >= settings.tail_cutoff;

  // u = c + scale * x / (1 - x) maps [0, x_max) onto [c, upper).
  const double x_max = (upper - c) / (upper - c + scale);
  const auto g = [&](double x) {
    const double one_minus = 1.0 - x;
    return f(c + scale * x / one_minus) * scale / (one_minus * one_minus);
  };
  double error = 0.0;
  const double body = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      g, 0.0, x_max, 15, settings.relative_tolerance, &error);
  term.payment += body;
  term.error = error;

  // Power-law tail beyond the last point, f(u) ~ u^-p.
  if (f_upper > 0.0) {
    const double half = c + 0.5 * (upper - c);
    const double quarter = c + 0.25 * (upper - c);
    const auto exponent = [&](double a, double fa, double b, double fb) {
      return (fa > 0.0 && fb > 0.0 && b > a && a > 0.0) ? std::log(fa / fb) / std::log(b / a)
                                                         : 0.0;
    };
    const double f_half = f(half);
    const double p1 = exponent(half, f_half, upper, f_upper);
    const double p2 = exponent(quarter, f(quarter), half, f_half);
    const auto tail = [&](double p) {
      return p > 1.0 ? f_upper * upper / (p - 1.0) : 0.0;
    };
    const double t1 = tail(p1);
    term.payment += t1;
    term.error += p2 > 1.0 ? std::abs(t1 - tail(p2)) : t1;
  }
  return term;
}

}  // namespace

void IntegratorSettings::validate() const {
  std::vector<std::string> violations;
  if (!(relative_tolerance > 0.0 && relative_tolerance < 1.0)) {
    violations.push_back("relative_tolerance must lie in (0, 1)");
  }
  if (!(tail_cutoff >= 0.0)) violations.push_back("tail_cutoff must be >= 0");
  if (max_upper_limit && !(*max_upper_limit > 0.0)) {
    violations.push_back("max_upper_limit must be > 0");
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

PaymentResult direct_payment(const Market& market, const CostVector& reported,
                             Execution /*execution*/) {
  check_costs(market, reported);
  const Allocation w = market.solve(reported);
  std::vector<double> payments(static_cast<std::size_t>(market.num_sellers()), 0.0);
  for (Index j = 0; j < market.num_sellers(); ++j) {
    if (!reported.absent(j)) {
      payments[static_cast<std::size_t>(j)] = cost_term(reported[j], market.sharing(j, w));
    }
  }
  return finish(market, Rule::kDirect, w, std::move(payments));
}

PaymentResult loo_payment(const Market& market, const CostVector& reported,
                          Execution execution) {
  check_costs(market, reported);
  const Allocation w = market.solve(reported);
  const double full = total_performance(market, w);
  std::vector<double> payments(static_cast<std::size_t>(market.num_sellers()), 0.0);
  for_each_index(market.num_sellers(), execution, [&](Index j) {
    if (reported.absent(j) || market.sharing(j, w) == 0.0) return;
    const Allocation without = market.solve(reported.without(j));
    payments[static_cast<std::size_t>(j)] = full - total_performance(market, without);
  });
  return finish(market, Rule::kLoo, w, std::move(payments));
}

PaymentResult shapley_payment(const Market& market, const CostVector& reported,
                              const ShapleyMode& mode, Execution execution) {
  check_costs(market, reported);
  const std::vector<Index> players = candidates(market, reported);
  const std::size_t ns = static_cast<std::size_t>(market.num_sellers());
  std::vector<double> payments(ns, 0.0);
  std::vector<double> errors;
  if (mode.kind == ShapleyMode::Kind::kExact) {
    if (static_cast<int>(players.size()) > kMaxExactShapleySellers) {
      throw SizeRefusal("exact Shapley over " + std::to_string(players.size()) +
                        " sellers needs 2^" + std::to_string(players.size()) +
                        " solves; use sampled mode");
    }
    const std::vector<double> table = coalition_values(market, reported, players, execution);
    const std::vector<double> phi =
        shapley_from_table(table, static_cast<int>(players.size()));
    for (std::size_t b = 0; b < players.size(); ++b) {
      payments[static_cast<std::size_t>(players[b])] = phi[b];
    }
  } else {
    errors.assign(ns, 0.0);
    if (!players.empty()) {
      const ShapleyEstimate est = sampled_shapley(market, reported, players,
                                                  mode.permutations, mode.seed, execution);
      for (std::size_t b = 0; b < players.size(); ++b) {
        payments[static_cast<std::size_t>(players[b])] = est.mean[b];
        errors[static_cast<std::size_t>(players[b])] = est.standard_error[b];
      }
    }
  }
  PaymentResult result = finish(market, Rule::kShapley, market.solve(reported),
                                std::move(payments));
  result.error_estimates = std::move(errors);
  return result;
}

PaymentResult myerson_payment(const Market& market, const CostVector& reported,
                              const IntegratorSettings& settings, Execution execution) {
  check_costs(market, reported);
  settings.validate();
  const Allocation w = market.solve(reported);
  const std::size_t ns = static_cast<std::size_t>(market.num_sellers());
  std::vector<MyersonTerm> terms(ns);
  for_each_index(market.num_sellers(), execution, [&](Index j) {
    terms[static_cast<std::size_t>(j)] =
        myerson_term(market, reported, j, market.sharing(j, w), settings);
  });
  std::vector<double> payments(ns);
  std::vector<double> errors(ns);
  std::vector<bool> truncated(ns);
  for (std::size_t j = 0; j < ns; ++j) {
    payments[j] = terms[j].payment;
    errors[j] = terms[j].error;
    truncated[j] = terms[j].truncated;
  }
  PaymentResult result = finish(market, Rule::kMyerson, w, std::move(payments));
  result.error_estimates = std::move(errors);
  result.truncated = std::move(truncated);
  return result;
}

PaymentResult vcg_payment(const Market& market, const CostVector& reported,
                          Execution execution) {
  check_costs(market, reported);
  const Allocation w = market.solve(reported);
  std::vector<double> payments(static_cast<std::size_t>(market.num_sellers()), 0.0);
  for_each_index(market.num_sellers(), execution, [&](Index j) {
    if (reported.absent(j) || market.sharing(j, w) == 0.0) return;
    const Allocation without = market.solve(reported.without(j));
    payments[static_cast<std::size_t>(j)] =
        others_welfare(market, w, reported, j) - others_welfare(market, without, reported, j);
  });
  return finish(market, Rule::kVcg, w, std::move(payments));
}

std::vector<double> vcg_upper_bound(const Market& market, const CostVector& costs) {
  check_costs(market, costs);
  const Allocation w = market.solve(costs);
  const double full = total_performance(market, w);
  std::vector<double> bound(static_cast<std::size_t>(market.num_sellers()), 0.0);
  for (Index j = 0; j < market.num_sellers(); ++j) {
    if (market.sharing(j, w) == 0.0) continue;
    bound[static_cast<std::size_t>(j)] =
        full - total_performance(market, w.without_column(j));
  }
  return bound;
}

CriticalCost critical_cost(const Market& market, Index seller, const CostVector& reported) {
  check_costs(market, reported);
  if (market.domain() != Domain::kDiscrete) {
    throw InvalidArgument("critical_cost requires a discrete market");
  }
  if (seller < 0 || seller >= market.num_sellers()) {
    throw InvalidArgument("seller index " + std::to_string(seller) + " out of range");
  }
  const auto selected_at = [&](double u) {
    return market.sharing(seller, market.solve(reported.with(seller, u))) > 0.0;
  };
  if (!selected_at(0.0)) return {seller, std::nullopt};
  double lo = 0.0;
  double hi = kMaxJudgeScore;
  if (selected_at(hi)) return {seller, hi};
  while (hi - lo > kCriticalTolerance) {
    const double mid = 0.5 * (lo + hi);
    (selected_at(mid) ? lo : hi) = mid;
  }
  return {seller, 0.5 * (lo + hi)};
}

PaymentResult myerson_discrete(const Market& market, const CostVector& reported,
                               Execution execution) {
  check_costs(market, reported);
  if (market.domain() != Domain::kDiscrete) {
    throw InvalidArgument("myerson_discrete requires a discrete market");
  }
  const Allocation w = market.solve(reported);
  std::vector<double> payments(static_cast<std::size_t>(market.num_sellers()), 0.0);
  for_each_index(market.num_sellers(), execution, [&](Index j) {
    if (market.sharing(j, w) == 0.0) return;
    payments[static_cast<std::size_t>(j)] =
        critical_cost(market, j, reported).value.value_or(0.0);
  });
  return finish(market, Rule::kMyerson, w, std::move(payments));
}

Eigen::MatrixXd redistribution_shares(const Market& market, const CostVector& costs,
                                      const std::vector<double>& seller_payments) {
  check_costs(market, costs);
  const Index nb = market.num_buyers();
  const Index ns = market.num_sellers();
  if (static_cast<Index>(seller_payments.size()) != ns) {
    throw ShapeMismatch("one payment per seller is required");
  }
  Eigen::MatrixXd transfers = Eigen::MatrixXd::Zero(nb, ns);
  if (nb == 1) {
    for (Index j = 0; j < ns; ++j) transfers(0, j) = seller_payments[static_cast<std::size_t>(j)];
    return transfers;
  }
  const Allocation w = market.solve(costs);
  Eigen::VectorXd value(nb);
  for (Index i = 0; i < nb; ++i) value(i) = market.performance(i, w);
  for (Index j = 0; j < ns; ++j) {
    const double payment = seller_payments[static_cast<std::size_t>(j)];
    const Allocation reduced = w.without_column(j);
    Eigen::VectorXd d(nb);
    for (Index i = 0; i < nb; ++i) d(i) = value(i) - market.performance(i, reduced);
    const double total = d.sum();
    Eigen::VectorXd eta;
    if (std::abs(total) <= 1e-14 * (1.0 + d.cwiseAbs().sum())) {
      if (payment != 0.0) {
        throw DegenerateRedistribution(
            "seller " + std::to_string(j) +
                " has a nonzero payment but no buyer loses value without it",
            j);
      }
      eta = Eigen::VectorXd::Constant(nb, 1.0 / static_cast<double>(nb));
    } else {
      eta = d / total;
    }
    double assigned = 0.0;
    for (Index i = 0; i + 1 < nb; ++i) {
      transfers(i, j) = eta(i) * payment;
      assigned += transfers(i, j);
    }
    transfers(nb - 1, j) = payment - assigned;
  }
  return transfers;
}

std::vector<double> redistribute(const Market& market, const CostVector& costs,
                                 const std::vector<double>& seller_payments) {
  const Eigen::MatrixXd transfers = redistribution_shares(market, costs, seller_payments);
  std::vector<double> charges(static_cast<std::size_t>(transfers.rows()));
  for (Index i = 0; i < transfers.rows(); ++i) {
    charges[static_cast<std::size_t>(i)] = transfers.row(i).sum();
  }
  return charges;
}

void attach_redistribution(const Market& market, const CostVector& costs,
                           PaymentResult& result) {
  std::vector<double> charges = redistribute(market, costs, result.seller_payments);
  std::vector<double> utilities(charges.size());
  double charged = 0.0;
  for (std::size_t i = 0; i < charges.size(); ++i) {
    utilities[i] = result.welfare.per_buyer_value[i] - charges[i];
    charged += charges[i];
  }
  double paid = 0.0;
  for (double p : result.seller_payments) paid += p;
  result.buyer_charges = std::move(charges);
  result.buyer_utilities = std::move(utilities);
  result.budget_gap = charged - paid;
}

PaymentResult compute_payment(const Market& market, Rule rule, const CostVector& reported,
                              const PaymentOptions& options) {
  switch (rule) {
    case Rule::kDirect: return direct_payment(market, reported, options.execution);
    case Rule::kLoo: return loo_payment(market, reported, options.execution);
    case Rule::kShapley:
      return shapley_payment(market, reported, options.shapley, options.execution);
    case Rule::kMyerson:
      if (market.domain() == Domain::kDiscrete) {
        return myerson_discrete(market, reported, options.execution);
      }
      return myerson_payment(market, reported, options.integrator, options.execution);
    case Rule::kVcg: return vcg_payment(market, reported, options.execution);
  }
  throw InvalidArgument("unknown payment rule");
}

double seller_payment(const Market& market, Rule rule, const CostVector& reported,
                      Index seller, const PaymentOptions& options) {
  check_costs(market, reported);
  if (seller < 0 || seller >= market.num_sellers()) {
    throw InvalidArgument("seller index " + std::to_string(seller) + " out of range");
  }
  if (reported.absent(seller)) return 0.0;
  const Allocation w = market.solve(reported);
  const double f = market.sharing(seller, w);
  switch (rule) {
    case Rule::kDirect: return cost_term(reported[seller], f);
    case Rule::kLoo:
      if (f == 0.0) return 0.0;
      return total_performance(market, w) -
             total_performance(market, market.solve(reported.without(seller)));
    case Rule::kVcg:
      if (f == 0.0) return 0.0;
      return others_welfare(market, w, reported, seller) -
             others_welfare(market, market.solve(reported.without(seller)), reported,
                            seller);
    case Rule::kMyerson:
      if (market.domain() == Domain::kDiscrete) {
        if (f == 0.0) return 0.0;
        return critical_cost(market, seller, reported).value.value_or(0.0);
      }
      options.integrator.validate();
      return myerson_term(market, reported, seller, f, options.integrator).payment;
    case Rule::kShapley:
      return shapley_payment(market, reported, options.shapley, options.execution)
          .seller_payments[static_cast<std::size_t>(seller)];
  }
  throw InvalidArgument("unknown payment rule");
}

std::string_view to_string(Additivity additivity) {
  switch (additivity) {
    case Additivity::kSubadditive: return "subadditive";
    case Additivity::kSuperadditive: return "superadditive";
    case Additivity::kAdditive: return "additive";
    case Additivity::kMixed: return "mixed";
    case Additivity::kInconclusive: return "inconclusive";
  }
  return "unknown";
}

AdditivityProbe coalition_additivity_probe(const Market& market, const CostVector& reported,
                                           double tolerance, Execution execution) {
  check_costs(market, reported);
  const std::vector<Index> players = candidates(market, reported);
  AdditivityProbe probe;
  const int n = static_cast<int>(players.size());
  if (n > kMaxProbeSellers) return probe;
  const std::vector<double> f = coalition_values(market, reported, players, execution);
  const double tol = tolerance * (1.0 + std::abs(f.back()));
  for (std::uint64_t m = 0; m < f.size(); ++m) {
    for (int j = 0; j < n; ++j) {
      const std::uint64_t bj = std::uint64_t{1} << j;
      if (m & bj) continue;
      for (int k = j + 1; k < n; ++k) {
        const std::uint64_t bk = std::uint64_t{1} << k;
        if (m & bk) continue;
        const double gap = f[m | bj] + f[m | bk] - f[m | bj | bk] - f[m];
        probe.submodular_gap = std::max(probe.submodular_gap, -gap);
        probe.supermodular_gap = std::max(probe.supermodular_gap, gap);
      }
    }
  }
  const bool sub = probe.submodular_gap <= tol;
  const bool super = probe.supermodular_gap <= tol;
  probe.verdict = sub && super ? Additivity::kAdditive
                  : sub        ? Additivity::kSubadditive
                  : super      ? Additivity::kSuperadditive
                               : Additivity::kMixed;
  return probe;
}

RedistributionProbe redistribution_probe(const Market& market, const CostVector& costs,
                                         double tolerance) {
  check_costs(market, costs);
  const Allocation w = market.solve(costs);
  RedistributionProbe probe;
  probe.passes = true;
  for (Index i = 0; i < market.num_buyers(); ++i) {
    const double value = market.performance(i, w);
    double lost = 0.0;
    for (Index j = 0; j < market.num_sellers(); ++j) {
      if (market.sharing(j, w) == 0.0) continue;
      lost += std::max(0.0, value - market.performance(i, w.without_column(j)));
    }
    const double slack = value - lost;
    probe.slack.push_back(slack);
    if (slack < -tolerance) probe.passes = false;
  }
  return probe;
}

}  // namespace datamarket
