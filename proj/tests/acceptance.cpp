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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "datamarket/allocation.hpp"
#include "datamarket/audit.hpp"
#include "datamarket/market_io.hpp"
#include "datamarket/markets.hpp"
#include "datamarket/payments.hpp"

namespace dm = datamarket;
using dm::Index;
using dm::Rule;

namespace {

constexpr int kSeeds = 20;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* format, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, a);
  return buf;
}

std::string fixture(const std::string& name) {
  return std::string(DATAMARKET_FIXTURE_DIR) + "/" + name;
}

std::size_t at(Index j) { return static_cast<std::size_t>(j); }

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& o, double seconds) {
  if (!o.pass) ++failures;
  std::printf("%s %d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str(), seconds);
  std::fflush(stdout);
}

// Shared instances and sweeps.
struct Instances {
  std::vector<dm::MeanEstimationMarket> continuous;
  std::vector<dm::RetrievalMarket> discrete;
  // (is_discrete, instance, rule, seller) -> sweep over the default grid.
  std::map<std::tuple<bool, int, Rule, Index>, std::vector<dm::SweepRecord>> sweeps;
  dm::GridSpec grid;

  const dm::Market& market(bool discrete_family, int i) const {
    return discrete_family ? static_cast<const dm::Market&>(discrete[at(i)])
                           : static_cast<const dm::Market&>(continuous[at(i)]);
  }

  const std::vector<dm::SweepRecord>& sweep(bool discrete_family, int i, Rule rule, Index j) {
    const auto key = std::make_tuple(discrete_family, i, rule, j);
    auto it = sweeps.find(key);
    if (it != sweeps.end()) return it->second;
    const dm::Market& m = market(discrete_family, i);
    auto records =
        dm::misreport_sweep(m, rule, j, grid.points_for(m.true_costs()[j]));
    return sweeps.emplace(key, std::move(records)).first->second;
  }

  // Unilateral best responses; sellers with f_j(c) = 0 everywhere are
  // still swept so that every column is covered.
  std::vector<double> best_responses(bool discrete_family, int i, Rule rule) {
    const dm::Market& m = market(discrete_family, i);
    std::vector<double> out;
    for (Index j = 0; j < m.num_sellers(); ++j) {
      out.push_back(dm::best_response(sweep(discrete_family, i, rule, j), m.true_costs()[j]));
    }
    return out;
  }

  bool truthful(bool discrete_family, int i, Index j, double br) const {
    const double c = market(discrete_family, i).true_costs()[j];
    return std::abs(br - c) <= dm::grid_step_at(grid.points_for(c), c);
  }
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// ---------------------------------------------------------------------------

Outcome worked_examples() {
  Outcome o;
  const auto e1 = dm::load_market(fixture("example1.json"));
  const auto e2 = dm::load_market(fixture("example2.json"));
  const auto e3 = dm::load_market(fixture("example3.json"));
  const double tol = 1e-9;
  const auto expect = [&](const std::string& what, double got, double want) {
    if (!near(got, want, tol)) {
      o.pass = false;
      o.detail += what + "=" + fmt("%.12g", got) + " ";
    }
  };
  expect("ex1.loo[d1]", dm::loo_payment(*e1, e1->true_costs()).seller_payments[0], 0.2);
  expect("ex2.loo[d1]", dm::loo_payment(*e2, e2->true_costs()).seller_payments[0], 0.2);
  const auto loo = dm::loo_payment(*e3, e3->true_costs()).seller_payments;
  const auto vcg = dm::vcg_payment(*e3, e3->true_costs()).seller_payments;
  const auto my = dm::compute_payment(*e3, Rule::kMyerson, e3->true_costs()).seller_payments;
  const auto c1 = dm::critical_cost(*e3, 0, e3->true_costs()).value;
  const auto c2 = dm::critical_cost(*e3, 1, e3->true_costs()).value;
  expect("ex3.loo[d1]", loo[0], 0.2);
  expect("ex3.loo[d2]", loo[1], 0.1);
  expect("ex3.vcg[d1]", vcg[0], 0.3);
  expect("ex3.vcg[d2]", vcg[1], 0.2);
  expect("ex3.myerson[d1]", my[0], 0.3);
  expect("ex3.myerson[d2]", my[1], 0.2);
  expect("ex3.critical[d1]", c1.value_or(-1.0), 0.3);
  expect("ex3.critical[d2]", c2.value_or(-1.0), 0.2);
  if (o.pass) {
    o.detail = "LOO (0.2), (0.2, 0.1); VCG, Myerson and critical costs (0.3, 0.2) within 1e-9";
  }
  return o;
}

Outcome closed_form(const Instances& in) {
  Outcome o;
  double worst_w = 0.0;
  double worst_sc = 0.0;
  for (const auto& m : in.continuous) {
    const dm::CostVector& c = m.true_costs();
    const dm::Allocation closed = m.solve(c);
    const dm::Allocation numeric = dm::solve_numeric(m, c);
    worst_w = std::max(worst_w, (closed.w - numeric.w).cwiseAbs().maxCoeff());
    Eigen::MatrixXd sys = m.c_mat();
    sys.diagonal() += m.seller_variances();
    for (Index j = 0; j < m.num_sellers(); ++j) sys(j, j) += c[j];
    const Eigen::MatrixXd solved = sys.ldlt().solve(m.b_mat().transpose());
    double identity = 0.0;
    for (Index i = 0; i < m.num_buyers(); ++i) {
      identity += m.buyer_means().row(i).squaredNorm() - m.b_mat().row(i).dot(solved.col(i));
    }
    const double sc = dm::social_welfare(m, closed, c).social_cost;
    worst_sc = std::max(worst_sc, std::abs(sc - identity));
  }
  o.pass = worst_w <= 1e-6 && worst_sc <= 1e-8;
  o.detail = "max |W_closed - W_numeric| = " + fmt("%.2e", worst_w) +
             ", max |SC - identity| = " + fmt("%.2e", worst_sc);
  return o;
}

struct ContinuousPayments {
  std::vector<dm::PaymentResult> myerson;
  std::vector<dm::PaymentResult> vcg;
  std::vector<std::vector<double>> upper;
};

double equivalence_tol(const ContinuousPayments& p, int i, std::size_t j) {
  return std::max(1e-4 * std::abs(p.vcg[at(i)].seller_payments[j]),
                  p.myerson[at(i)].error_estimates[j]);
}

Outcome myerson_vcg(const Instances& in, ContinuousPayments& p) {
  Outcome o;
  double worst = 0.0;
  int truncated = 0;
  for (int i = 0; i < kSeeds; ++i) {
    const auto& m = in.continuous[at(i)];
    p.myerson.push_back(dm::myerson_payment(m, m.true_costs()));
    p.vcg.push_back(dm::vcg_payment(m, m.true_costs()));
    p.upper.push_back(dm::vcg_upper_bound(m, m.true_costs()));
    for (std::size_t j = 0; j < p.vcg.back().seller_payments.size(); ++j) {
      const double gap =
          std::abs(p.myerson.back().seller_payments[j] - p.vcg.back().seller_payments[j]);
      const double tol = equivalence_tol(p, i, j);
      worst = std::max(worst, gap / std::max(tol, 1e-300));
      if (gap > tol) o.pass = false;
      if (p.myerson.back().truncated[j]) ++truncated;
    }
  }
  o.detail = "max |Myerson - VCG| / tolerance = " + fmt("%.3g", worst) +
             ", truncated integrals = " + std::to_string(truncated);
  return o;
}

Outcome ordering(const ContinuousPayments& p) {
  Outcome o;
  int checked = 0;
  for (int i = 0; i < kSeeds; ++i) {
    for (std::size_t j = 0; j < p.upper[at(i)].size(); ++j) {
      const double tol = equivalence_tol(p, i, j);
      const double my = p.myerson[at(i)].seller_payments[j];
      const double vcg = p.vcg[at(i)].seller_payments[j];
      const double ub = p.upper[at(i)][j];
      if (!(my <= vcg + tol && vcg <= ub + tol)) {
        o.pass = false;
        o.detail += "seed " + std::to_string(i + 1) + " seller " + std::to_string(j) + "; ";
      }
      ++checked;
    }
  }
  if (o.pass) o.detail = "Myerson <= VCG <= upper bound on " + std::to_string(checked) + " sellers";
  return o;
}

Outcome ic_ir(Instances& in) {
  Outcome o;
  int checked = 0;
  int untruthful = 0;
  int ir_failures = 0;
  for (bool discrete_family : {false, true}) {
    for (int i = 0; i < kSeeds; ++i) {
      const dm::Market& m = in.market(discrete_family, i);
      for (Rule rule : {Rule::kMyerson, Rule::kVcg}) {
        const std::vector<double> br = in.best_responses(discrete_family, i, rule);
        const dm::PaymentResult truth = dm::compute_payment(m, rule, m.true_costs());
        for (Index j = 0; j < m.num_sellers(); ++j) {
          ++checked;
          if (!in.truthful(discrete_family, i, j, br[at(j)])) ++untruthful;
          if (truth.seller_utilities[at(j)] < -1e-9) ++ir_failures;
        }
      }
    }
  }
  o.pass = untruthful == 0 && ir_failures == 0;
  o.detail = std::to_string(checked) + " (seller, rule) pairs over 20 continuous and 20 " +
             "discrete markets; untruthful " + std::to_string(untruthful) +
             ", IR violations " + std::to_string(ir_failures);
  return o;
}

Outcome untruthful_rules(Instances& in) {
  Outcome o;
  std::string detail;
  for (Rule rule : {Rule::kLoo, Rule::kShapley}) {
    int witness = -1;
    double witness_poa = 0.0;
    double max_poa = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kSeeds; ++i) {
      const std::vector<double> br = in.best_responses(false, i, rule);
      const dm::PoaReport poa = dm::price_of_anarchy(in.continuous[at(i)], br);
      max_poa = std::max(max_poa, poa.poa);
      bool deviates = false;
      for (Index j = 0; j < 10; ++j) deviates = deviates || !in.truthful(false, i, j, br[at(j)]);
      if (deviates && poa.poa > 1.0 && (witness < 0 || poa.poa > witness_poa)) {
        witness = i + 1;
        witness_poa = poa.poa;
      }
    }
    if (witness < 0) o.pass = false;
    detail += std::string(dm::to_string(rule)) + ": " +
              (witness < 0 ? "no witness" : "seed " + std::to_string(witness) + " PoA " +
                                                fmt("%.4f", witness_poa)) +
              " (max PoA " + fmt("%.4f", max_poa) + "); ";
  }
  int direct_checked = 0;
  int direct_bad = 0;
  for (int i = 0; i < kSeeds; ++i) {
    const auto& m = in.continuous[at(i)];
    const dm::Allocation w = m.solve(m.true_costs());
    const std::vector<double> br = in.best_responses(false, i, Rule::kDirect);
    for (Index j = 0; j < 10; ++j) {
      if (m.sharing(j, w) <= 0.0) continue;
      ++direct_checked;
      if (!(br[at(j)] > m.true_costs()[j])) ++direct_bad;
    }
  }
  if (direct_bad > 0) o.pass = false;
  o.detail = detail + "direct over-reports on " +
             std::to_string(direct_checked - direct_bad) + "/" +
             std::to_string(direct_checked) + " allocated sellers";
  return o;
}

Outcome monotone_sharing(Instances& in) {
  Outcome o;
  // Every rule on every instance, so the cache holds the complete set.
  for (bool discrete_family : {false, true}) {
    for (int i = 0; i < kSeeds; ++i) {
      for (Rule rule : dm::kAllRules) {
        for (Index j = 0; j < in.market(discrete_family, i).num_sellers(); ++j) {
          in.sweep(discrete_family, i, rule, j);
        }
      }
    }
  }
  int violations = 0;
  for (const auto& [key, records] : in.sweeps) {
    for (std::size_t g = 1; g < records.size(); ++g) {
      if (records[g].sharing > records[g - 1].sharing) ++violations;
    }
  }
  o.pass = violations == 0;
  o.detail = std::to_string(in.sweeps.size()) + " sweeps of " + std::to_string(in.grid.points) +
             " points, " + std::to_string(violations) + " increases";
  return o;
}

struct Enumerated {
  double welfare = 0.0;
  std::vector<bool> selection;
  bool unique = true;
};

// Best subset of at most k pool documents by exhaustive enumeration.
Enumerated brute_force(const dm::RetrievalMarket& m, const dm::CostVector& c) {
  const std::vector<Index>& pool = m.pool();
  const std::size_t n = pool.size();
  double best = 0.0;
  double second = -std::numeric_limits<double>::infinity();
  std::uint64_t best_mask = 0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    if (std::popcount(mask) > m.budget()) continue;
    double total = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      if (mask >> b & 1U) total += m.gains()[at(pool[b])] - c[pool[b]];
    }
    if (total > best) {
      second = best;
      best = total;
      best_mask = mask;
    } else {
      second = std::max(second, total);
    }
  }
  Enumerated out;
  out.welfare = best;
  out.unique = best - second > 1e-12;
  out.selection.assign(at(m.num_sellers()), false);
  for (std::size_t b = 0; b < n; ++b) {
    if (best_mask >> b & 1U) out.selection[at(pool[b])] = true;
  }
  return out;
}

Outcome discrete_oracles(const Instances& in) {
  Outcome o;
  std::vector<const dm::RetrievalMarket*> markets;
  for (const auto& m : in.discrete) markets.push_back(&m);
  std::vector<std::unique_ptr<dm::Market>> fixtures;
  for (const char* name : {"example1.json", "example2.json", "example3.json", "fig5_high.json",
                           "fig5_low.json"}) {
    fixtures.push_back(dm::load_market(fixture(name)));
    markets.push_back(&dynamic_cast<const dm::RetrievalMarket&>(*fixtures.back()));
  }
  int selections = 0;
  int selection_mismatch = 0;
  int thresholds = 0;
  double worst_threshold = 0.0;
  for (const dm::RetrievalMarket* m : markets) {
    if (m->pool_size() > 12) continue;
    const dm::CostVector& c = m->true_costs();
    const dm::Allocation w = m->solve(c);
    double welfare = 0.0;
    for (Index d = 0; d < m->num_sellers(); ++d) {
      if (w(0, d) == 1.0) welfare += m->gains()[at(d)] - c[d];
    }
    const Enumerated best = brute_force(*m, c);
    ++selections;
    std::vector<bool> chosen(at(m->num_sellers()));
    for (Index d = 0; d < m->num_sellers(); ++d) chosen[at(d)] = w(0, d) == 1.0;
    if (std::abs(welfare - best.welfare) > 1e-12 ||
        (best.unique && chosen != best.selection)) {
      ++selection_mismatch;
    }
    const dm::PaymentResult my = dm::myerson_discrete(*m, c);
    for (Index d = 0; d < m->num_sellers(); ++d) {
      if (w(0, d) != 1.0) continue;
      // Midpoint of the last selected and first rejected grid points.
      double last = -1.0;
      double first_out = -1.0;
      for (int g = 0; g <= 10000; ++g) {
        const double u = 10.0 * g / 10000.0;
        if (m->solve(c.with(d, u))(0, d) == 1.0) {
          last = u;
        } else if (first_out < 0.0 && last >= 0.0) {
          first_out = u;
        }
      }
      const double scanned = first_out < 0.0 ? last : 0.5 * (last + first_out);
      ++thresholds;
      worst_threshold =
          std::max(worst_threshold, std::abs(my.seller_payments[at(d)] - scanned));
    }
  }
  o.pass = selection_mismatch == 0 && worst_threshold <= 1e-3;
  o.detail = std::to_string(selections) + " selections vs enumeration, " +
             std::to_string(selection_mismatch) + " mismatches; " + std::to_string(thresholds) +
             " thresholds vs 10^4-point scan, max gap " + fmt("%.2e", worst_threshold);
  return o;
}

Outcome redistribution() {
  Outcome o;
  int found = 0;
  double worst_gap = 0.0;
  double worst_column = 0.0;
  double min_utility = std::numeric_limits<double>::infinity();
  std::string seeds;
  for (std::uint64_t seed = 1; seed <= 200 && found < 10; ++seed) {
    const auto m = dm::build_random_mean_market(5, 10, 3, seed);
    if (!dm::redistribution_probe(m, m.true_costs()).passes) continue;
    ++found;
    seeds += (seeds.empty() ? "" : ",") + std::to_string(seed);
    for (Rule rule : {Rule::kMyerson, Rule::kVcg}) {
      dm::PaymentResult r = dm::compute_payment(m, rule, m.true_costs());
      dm::attach_redistribution(m, m.true_costs(), r);
      worst_gap = std::max(worst_gap, std::abs(*r.budget_gap));
      for (double u : *r.buyer_utilities) min_utility = std::min(min_utility, u);
      const Eigen::MatrixXd t = dm::redistribution_shares(m, m.true_costs(), r.seller_payments);
      for (Index j = 0; j < t.cols(); ++j) {
        worst_column =
            std::max(worst_column, std::abs(t.col(j).sum() - r.seller_payments[at(j)]));
      }
    }
  }
  o.pass = found == 10 && min_utility >= -1e-9 && worst_gap <= 1e-12 && worst_column <= 1e-12;
  o.detail = std::to_string(found) + " instances (seeds " + seeds + "), min buyer utility " +
             fmt("%.4g", min_utility) + ", max budget gap " + fmt("%.1e", worst_gap) +
             ", max per-seller gap " + fmt("%.1e", worst_column);
  return o;
}

Outcome retrieval_regimes() {
  Outcome o;
  const auto high = dm::load_market(fixture("fig5_high.json"));
  const auto low = dm::load_market(fixture("fig5_low.json"));
  const dm::GridSpec grid;
  const dm::AuditVerdict h = dm::audit_rule(*high, Rule::kLoo, grid);
  const dm::AuditVerdict l = dm::audit_rule(*low, Rule::kLoo, grid);
  const dm::Allocation selected = high->solve(high->true_costs());
  std::string high_br;
  for (Index d = 0; d < 3; ++d) {
    if (selected(0, d) != 1.0 || h.truthful[at(d)] ||
        !(h.best_responses[at(d)] > high->true_costs()[d])) {
      o.pass = false;
    }
    high_br += fmt("%.3g", h.best_responses[at(d)]) + (d < 2 ? "/" : "");
  }
  if (!h.collapsed) o.pass = false;
  std::string low_pay;
  for (Index d = 0; d < 3; ++d) {
    if (!l.truthful[at(d)] || !(l.payments[at(d)] > 0.0)) o.pass = false;
    low_pay += fmt("%.3g", l.payments[at(d)]) + (d < 2 ? "/" : "");
  }
  if (l.collapsed) o.pass = false;
  o.detail = "high costs: best responses " + high_br + " over truth, final selection " +
             (h.collapsed ? "empty" : "nonempty") + "; low costs: truthful, payments " + low_pay;
  return o;
}

}  // namespace

int main() {
  Clock total;
  Instances in;
  for (int i = 0; i < kSeeds; ++i) {
    const auto seed = static_cast<std::uint64_t>(i + 1);
    in.continuous.push_back(dm::build_random_mean_market(5, 10, 3, seed));
    in.discrete.push_back(dm::build_random_retrieval_market(15, 10, 1 + i % 2, seed));
  }
  ContinuousPayments payments;

  const auto run = [](int id, const std::string& name, double limit,
                      const std::function<Outcome()>& body) {
    Clock clock;
    Outcome o = body();
    const double s = clock.seconds();
    if (limit > 0.0 && s > limit) {
      o.pass = false;
      o.detail += "; exceeded " + fmt("%.0f", limit) + " s";
    }
    report(id, name, o, s);
  };
  run(1, "worked retrieval examples", 1.0, [] { return worked_examples(); });
  run(2, "closed-form allocation", 30.0, [&] { return closed_form(in); });
  run(3, "Myerson equals VCG", 300.0, [&] { return myerson_vcg(in, payments); });
  run(4, "payment ordering", 0.0, [&] { return ordering(payments); });
  run(5, "incentive compatibility and seller IR", 0.0, [&] { return ic_ir(in); });
  run(6, "untruthful rules", 0.0, [&] { return untruthful_rules(in); });
  run(7, "sharing monotone in reported cost", 0.0, [&] { return monotone_sharing(in); });
  run(8, "discrete solver and thresholds", 0.0, [&] { return discrete_oracles(in); });
  run(9, "buyer redistribution", 0.0, [] { return redistribution(); });
  run(10, "retrieval cost regimes", 0.0, [] { return retrieval_regimes(); });
  std::printf("%d of 10 criteria passed in %.1f s\n", 10 - failures, total.seconds());
  return failures == 0 ? 0 : 1;
}
