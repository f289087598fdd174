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

#include <cmath>

#include <doctest.h>

#include "datamarket/kernels.hpp"
#include "datamarket/markets.hpp"
#include "datamarket/payments.hpp"
#include "testing.hpp"

namespace datamarket {
namespace {

using testing::load_fixture;
using testing::permutation_shapley;
using testing::table_market;

// One seller whose data is worth `value` to the single buyer; it is
// allocated (f = 1) exactly when its report is below `value`.
class StepMarket final : public Market {
 public:
  StepMarket(double value, double cost)
      : Market(CostVector{cost}, std::nullopt), value_(value) {}
  std::string_view family() const override { return "step"; }
  Domain domain() const override { return Domain::kUnconstrained; }
  Index num_buyers() const override { return 1; }
  double performance(Index, const Allocation& w) const override { return value_ * w(0, 0); }
  double sharing(Index, const Allocation& w) const override { return w(0, 0); }
  double standalone_loss(Index) const override { return value_; }
  Allocation solve(const CostVector& c) const override {
    Allocation w = Allocation::zeros(1, 1);
    if (!c.absent(0) && c[0] < value_) w.w(0, 0) = 1.0;
    return w;
  }

 private:
  double value_;
};

MeanEstimationMarket duplicate_seller_market() {
  Eigen::MatrixXd buyers(2, 2);
  buyers << 1.0, 0.5, 0.3, 1.2;
  Eigen::MatrixXd sellers(3, 2);
  sellers << 1.0, 1.0, 1.0, 1.0, 0.2, 1.5;
  Eigen::VectorXd var(3);
  var << 0.4, 0.4, 0.1;
  return MeanEstimationMarket(buyers, sellers, var, CostVector{2.0, 2.0, 3.0});
}

MeanEstimationMarket identical_buyer_market() {
  Eigen::MatrixXd buyers(2, 2);
  buyers << 1.0, 0.5, 1.0, 0.5;
  Eigen::MatrixXd sellers(2, 2);
  sellers << 1.0, 0.2, 0.1, 1.0;
  Eigen::VectorXd var(2);
  var << 0.3, 0.5;
  return MeanEstimationMarket(buyers, sellers, var, CostVector{1.0, 2.0});
}

std::vector<double> column_payments(const PaymentResult& r) { return r.seller_payments; }

// ---------------------------------------------------------------------------
// Direct

TEST_CASE("direct payment is reported cost times sharing") {
  const auto m = build_random_mean_market(5, 10, 3, 2);
  const PaymentResult r = direct_payment(m, m.true_costs());
  const Allocation w = m.solve(m.true_costs());
  for (Index j = 0; j < 10; ++j) {
    CHECK(r.seller_payments[static_cast<std::size_t>(j)] ==
          doctest::Approx(m.true_costs()[j] * w.w.col(j).squaredNorm()).epsilon(1e-12));
    CHECK(std::abs(r.seller_utilities[static_cast<std::size_t>(j)]) < 1e-12);
  }
  const PaymentResult free = direct_payment(m, m.true_costs().with(3, 0.0));
  CHECK(free.seller_payments[3] == 0.0);
}

// ---------------------------------------------------------------------------
// Leave-one-out

TEST_CASE("leave-one-out payments on the worked retrieval examples") {
  const auto e1 = load_fixture("example1.json");
  const PaymentResult r1 = loo_payment(*e1, e1->true_costs());
  CHECK(r1.seller_payments[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(r1.seller_payments[1] == 0.0);

  const auto e3 = load_fixture("example3.json");
  const PaymentResult r3 = loo_payment(*e3, e3->true_costs());
  CHECK(r3.seller_payments[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(r3.seller_payments[1] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r3.seller_payments[2] == 0.0);
  CHECK(r3.welfare.social_welfare == doctest::Approx(0.75));
}

TEST_CASE("high costs make the leave-one-out payment fall short of cost") {
  const auto e2 = load_fixture("example2.json");
  const PaymentResult r = loo_payment(*e2, e2->true_costs());
  CHECK(r.seller_payments[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(r.seller_utilities[0] == doctest::Approx(-0.1).epsilon(1e-12));
}

TEST_CASE("leave-one-out equals the explicit performance difference") {
  const auto m = build_random_mean_market(3, 4, 2, 6);
  const CostVector& c = m.true_costs();
  const PaymentResult r = loo_payment(m, c);
  for (Index j = 0; j < 4; ++j) {
    const double expected = total_performance(m, m.solve(c)) -
                            total_performance(m, m.solve(c.without(j)));
    CHECK(r.seller_payments[static_cast<std::size_t>(j)] ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

// ---------------------------------------------------------------------------
// Shapley

TEST_CASE("exact Shapley matches enumeration over orderings") {
  const auto m = build_random_mean_market(2, 4, 2, 31);
  const CostVector& c = m.true_costs();
  const auto value = [&](std::uint64_t mask) {
    std::vector<bool> members(4);
    for (int j = 0; j < 4; ++j) members[static_cast<std::size_t>(j)] = (mask >> j & 1U) != 0;
    return mask == 0 ? 0.0 : total_performance(m, m.solve_subset(members, c));
  };
  const std::vector<double> expected = permutation_shapley(4, value);
  const PaymentResult r = shapley_payment(m, c);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(r.seller_payments[j] == doctest::Approx(expected[j]).epsilon(1e-10));
  }
}

TEST_CASE("Shapley efficiency: payments sum to the grand coalition value") {
  const auto e3 = load_fixture("example3.json");
  const PaymentResult r = shapley_payment(*e3, e3->true_costs());
  double total = 0.0;
  for (double p : r.seller_payments) total += p;
  CHECK(total == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("a single seller's Shapley payment is its leave-one-out payment") {
  Eigen::MatrixXd buyers(2, 2);
  buyers << 1.0, 0.4, 0.2, 0.9;
  Eigen::MatrixXd sellers(1, 2);
  sellers << 0.8, 0.7;
  const MeanEstimationMarket m(buyers, sellers, Eigen::VectorXd::Constant(1, 0.3),
                               CostVector{1.5});
  CHECK(shapley_payment(m, m.true_costs()).seller_payments[0] ==
        doctest::Approx(loo_payment(m, m.true_costs()).seller_payments[0]).epsilon(1e-12));
}

TEST_CASE("duplicate sellers receive equal Shapley payments") {
  const auto m = duplicate_seller_market();
  const PaymentResult r = shapley_payment(m, m.true_costs());
  CHECK(r.seller_payments[0] == doctest::Approx(r.seller_payments[1]).epsilon(1e-12));
}

TEST_CASE("sampled Shapley lies within three standard errors of exact") {
  const auto m = build_random_mean_market(5, 3, 3, 8);
  const PaymentResult exact = shapley_payment(m, m.true_costs());
  const PaymentResult sampled =
      shapley_payment(m, m.true_costs(), ShapleyMode::sampled(4000, 12345));
  REQUIRE(sampled.error_estimates.size() == 3);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(sampled.error_estimates[j] > 0.0);
    CHECK(std::abs(sampled.seller_payments[j] - exact.seller_payments[j]) <=
          3.0 * sampled.error_estimates[j]);
  }
}

TEST_CASE("sampled Shapley does not depend on the execution mode") {
  const auto m = build_random_mean_market(3, 5, 2, 9);
  const auto a = shapley_payment(m, m.true_costs(), ShapleyMode::sampled(300, 4),
                                 Execution::kSerial);
  const auto b = shapley_payment(m, m.true_costs(), ShapleyMode::sampled(300, 4),
                                 Execution::kParallel);
  CHECK(a.seller_payments == b.seller_payments);
  CHECK(a.error_estimates == b.error_estimates);
}

TEST_CASE("exact Shapley refuses large markets") {
  const auto m = build_random_retrieval_market(25, 21, 2, 3);
  CHECK_THROWS_AS(shapley_payment(m, m.true_costs()), SizeRefusal);
  const auto small_pool = build_random_retrieval_market(25, 8, 2, 3);
  const PaymentResult r = shapley_payment(small_pool, small_pool.true_costs());
  for (Index d = 0; d < 25; ++d) {
    if (!small_pool.is_candidate(d)) CHECK(r.seller_payments[static_cast<std::size_t>(d)] == 0.0);
  }
}

// ---------------------------------------------------------------------------
// Myerson

TEST_CASE("Myerson payment on the mean market matches the analytic integral") {
  // Along seller j's cost, f_j(u) = f0 / (1 + (u - c_j) m_jj)^2 with
  // m = (C + V + A)^{-1}, so the integral from c_j to infinity is f0 / m_jj.
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto m = build_random_mean_market(5, 10, 3, seed);
    const CostVector& c = m.true_costs();
    Eigen::MatrixXd sys = m.c_mat();
    sys.diagonal() += m.seller_variances();
    for (Index j = 0; j < 10; ++j) sys(j, j) += c[j];
    const Eigen::MatrixXd inv = sys.inverse();
    const PaymentResult r = myerson_payment(m, c);
    const Allocation w = m.solve(c);
    for (Index j = 0; j < 10; ++j) {
      const double f0 = w.w.col(j).squaredNorm();
      const double expected = c[j] * f0 + f0 / inv(j, j);
      const std::size_t k = static_cast<std::size_t>(j);
      CHECK(std::abs(r.seller_payments[k] - expected) <=
            std::max(1e-6 * expected, r.error_estimates[k]));
      CHECK_FALSE(r.truncated[k]);
    }
  }
}

TEST_CASE("Myerson payment equals VCG on unconstrained markets") {
  for (std::uint64_t seed = 40; seed < 45; ++seed) {
    const auto m = build_random_mean_market(5, 10, 3, seed);
    const PaymentResult my = myerson_payment(m, m.true_costs());
    const PaymentResult vcg = vcg_payment(m, m.true_costs());
    for (std::size_t j = 0; j < 10; ++j) {
      CHECK(std::abs(my.seller_payments[j] - vcg.seller_payments[j]) <=
            std::max(1e-4 * std::abs(vcg.seller_payments[j]), my.error_estimates[j]));
    }
  }
}

TEST_CASE("Myerson payment on a step market is the threshold") {
  const StepMarket m(0.7, 0.2);
  const PaymentResult r = myerson_payment(m, m.true_costs());
  CHECK(std::abs(r.seller_payments[0] - 0.7) <= std::max(1e-6, r.error_estimates[0]));
  const StepMarket out(0.7, 0.9);
  CHECK(myerson_payment(out, out.true_costs()).seller_payments[0] == 0.0);
}

TEST_CASE("Myerson integral flags truncation at the hard cap") {
  const auto m = build_random_mean_market(2, 3, 2, 5);
  IntegratorSettings s;
  s.max_upper_limit = 2.0 * m.true_costs().max_finite();
  const PaymentResult r = myerson_payment(m, m.true_costs(), s);
  bool any = false;
  for (bool t : r.truncated) any = any || t;
  CHECK(any);
  IntegratorSettings bad;
  bad.relative_tolerance = 2.0;
  CHECK_THROWS_AS(myerson_payment(m, m.true_costs(), bad), ValidationError);
}

// ---------------------------------------------------------------------------
// VCG

TEST_CASE("VCG payments on the top-2 example") {
  const auto e3 = load_fixture("example3.json");
  const PaymentResult r = vcg_payment(*e3, e3->true_costs());
  CHECK(r.seller_payments[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(r.seller_payments[1] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(r.seller_payments[2] == 0.0);
}

TEST_CASE("VCG upper bound dominates VCG") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto m = build_random_mean_market(5, 10, 3, seed);
    const std::vector<double> bound = vcg_upper_bound(m, m.true_costs());
    const PaymentResult vcg = vcg_payment(m, m.true_costs());
    for (std::size_t j = 0; j < 10; ++j) {
      CHECK(vcg.seller_payments[j] <= bound[j] + 1e-4 * std::abs(bound[j]));
    }
  }
}

TEST_CASE("VCG upper bound edge cases") {
  const StepMarket out(0.5, 0.9);
  CHECK(vcg_upper_bound(out, out.true_costs())[0] == 0.0);
  const auto e1 = load_fixture("example1.json");
  // k = 1: zeroing the selected document leaves nothing.
  CHECK(vcg_upper_bound(*e1, e1->true_costs())[0] == doctest::Approx(0.9));
}

// ---------------------------------------------------------------------------
// Discrete Myerson

TEST_CASE("critical costs on the top-2 example") {
  const auto e3 = load_fixture("example3.json");
  const CriticalCost c1 = critical_cost(*e3, 0, e3->true_costs());
  const CriticalCost c2 = critical_cost(*e3, 1, e3->true_costs());
  REQUIRE(c1.value);
  REQUIRE(c2.value);
  CHECK(std::abs(*c1.value - 0.3) <= 1e-9);
  CHECK(std::abs(*c2.value - 0.2) <= 1e-9);
  const PaymentResult r = myerson_discrete(*e3, e3->true_costs());
  CHECK(std::abs(r.seller_payments[0] - 0.3) <= 1e-9);
  CHECK(std::abs(r.seller_payments[1] - 0.2) <= 1e-9);
  CHECK(r.seller_payments[2] == 0.0);
}

TEST_CASE("critical cost brackets the selection threshold") {
  const auto e3 = load_fixture("example3.json");
  const CriticalCost c = critical_cost(*e3, 0, e3->true_costs());
  const double eps = 1e-9;
  CHECK(e3->solve(e3->true_costs().with(0, *c.value - eps))(0, 0) == 1.0);
  CHECK(e3->solve(e3->true_costs().with(0, *c.value + eps))(0, 0) == 0.0);
}

TEST_CASE("a document that loses even at zero cost is never selected") {
  // k = 1 and doc 2 scores below doc 1's welfare at any report.
  const auto m = table_market({{{0}, 0.9}, {{1}, 0.5}}, {0.1, 0.2}, 1);
  CHECK_FALSE(critical_cost(m, 1, m.true_costs()).value.has_value());
  CHECK_THROWS_AS(critical_cost(build_random_mean_market(1, 2, 1, 1), 0, CostVector{1.0, 1.0}),
                  InvalidArgument);
}

TEST_CASE("single candidate is paid its score") {
  const auto m = table_market({{{0}, 0.6}}, {0.1}, 1);
  const PaymentResult r = myerson_discrete(m, m.true_costs());
  CHECK(std::abs(r.seller_payments[0] - 0.6) <= 1e-9);
}

TEST_CASE("discrete Myerson equals VCG and a grid scan on random corpora") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto m = build_random_retrieval_market(6, 6, 1 + seed % 3, seed);
    const CostVector& c = m.true_costs();
    const PaymentResult my = myerson_discrete(m, c);
    const PaymentResult vcg = vcg_payment(m, c);
    for (Index j = 0; j < 6; ++j) {
      const std::size_t k = static_cast<std::size_t>(j);
      CHECK(std::abs(my.seller_payments[k] - vcg.seller_payments[k]) <= 1e-8);
      if (my.seller_payments[k] == 0.0) continue;
      double last_selected = 0.0;
      for (int g = 0; g <= 10000; ++g) {
        const double u = 10.0 * g / 10000.0;
        if (m.solve(c.with(j, u))(0, j) == 1.0) last_selected = u;
      }
      CHECK(std::abs(my.seller_payments[k] - last_selected) <= 1e-3);
    }
  }
}

TEST_CASE("compute_payment dispatches Myerson by domain") {
  const auto e3 = load_fixture("example3.json");
  const PaymentResult r = compute_payment(*e3, Rule::kMyerson, e3->true_costs());
  CHECK(std::abs(r.seller_payments[0] - 0.3) <= 1e-9);
  for (Rule rule : kAllRules) {
    const PaymentResult p = compute_payment(*e3, rule, e3->true_costs());
    CHECK(p.rule == rule);
    for (Index j = 0; j < 3; ++j) {
      CHECK(seller_payment(*e3, rule, e3->true_costs(), j) ==
            doctest::Approx(p.seller_payments[static_cast<std::size_t>(j)]).epsilon(1e-12));
    }
  }
}

TEST_CASE("seller_payment agrees with the full rule on the mean market") {
  const auto m = build_random_mean_market(3, 5, 2, 14);
  for (Rule rule : kAllRules) {
    const PaymentResult p = compute_payment(m, rule, m.true_costs());
    for (Index j = 0; j < 5; ++j) {
      CHECK(seller_payment(m, rule, m.true_costs(), j) ==
            doctest::Approx(p.seller_payments[static_cast<std::size_t>(j)]).epsilon(1e-10));
    }
  }
}

// ---------------------------------------------------------------------------
// Ordering properties

TEST_CASE("Myerson <= VCG <= upper bound on continuous markets") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto mean = build_random_mean_market(5, 10, 3, seed);
    const auto mix = build_random_mixture_market(6, seed);
    for (const Market* m : std::initializer_list<const Market*>{&mean, &mix}) {
      const PaymentResult my = myerson_payment(*m, m->true_costs());
      const PaymentResult vcg = vcg_payment(*m, m->true_costs());
      const std::vector<double> ub = vcg_upper_bound(*m, m->true_costs());
      for (std::size_t j = 0; j < ub.size(); ++j) {
        const double tol = 1e-4 * std::max(1e-6, std::abs(vcg.seller_payments[j]));
        CHECK(my.seller_payments[j] <= vcg.seller_payments[j] + tol + my.error_estimates[j]);
        CHECK(vcg.seller_payments[j] <= ub[j] + tol);
      }
    }
  }
}

TEST_CASE("leave-one-out and Shapley order by the additivity probe") {
  int conclusive = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto m = build_random_mean_market(3, 5, 2, seed);
    const AdditivityProbe probe = coalition_additivity_probe(m, m.true_costs());
    const PaymentResult loo = loo_payment(m, m.true_costs());
    const PaymentResult sh = shapley_payment(m, m.true_costs());
    for (std::size_t j = 0; j < 5; ++j) {
      const double tol = 1e-9 * (1.0 + std::abs(sh.seller_payments[j]));
      if (probe.verdict == Additivity::kSubadditive) {
        CHECK(loo.seller_payments[j] <= sh.seller_payments[j] + tol);
      } else if (probe.verdict == Additivity::kSuperadditive) {
        CHECK(loo.seller_payments[j] >= sh.seller_payments[j] - tol);
      }
    }
    if (probe.verdict == Additivity::kSubadditive ||
        probe.verdict == Additivity::kSuperadditive) {
      ++conclusive;
    }
  }
  CHECK(conclusive > 0);
}

TEST_CASE("additivity probe verdicts on hand-built tables") {
  const auto additive = table_market({{{0}, 1.0}, {{1}, 2.0}}, {0.1, 0.1}, 2, true);
  CHECK(coalition_additivity_probe(additive, additive.true_costs()).verdict ==
        Additivity::kAdditive);
  const auto redundant =
      table_market({{{0}, 1.0}, {{1}, 2.0}, {{0, 1}, 2.5}}, {0.1, 0.1}, 2);
  CHECK(coalition_additivity_probe(redundant, redundant.true_costs()).verdict ==
        Additivity::kSubadditive);
  const auto complements =
      table_market({{{0}, 1.0}, {{1}, 2.0}, {{0, 1}, 4.0}}, {0.1, 0.1}, 2);
  CHECK(coalition_additivity_probe(complements, complements.true_costs()).verdict ==
        Additivity::kSuperadditive);
  const auto big = build_random_retrieval_market(14, 13, 2, 1);
  CHECK(coalition_additivity_probe(big, big.true_costs()).verdict ==
        Additivity::kInconclusive);
}

// ---------------------------------------------------------------------------
// Redistribution

TEST_CASE("single buyer pays every seller payment") {
  const auto m = build_random_mixture_market(4, 3);
  const PaymentResult vcg = vcg_payment(m, m.true_costs());
  const std::vector<double> charges = redistribute(m, m.true_costs(), vcg.seller_payments);
  double total = 0.0;
  for (double p : vcg.seller_payments) total += p;
  REQUIRE(charges.size() == 1);
  CHECK(charges[0] == doctest::Approx(total).epsilon(1e-15));
}

TEST_CASE("identical buyers split every payment equally") {
  const auto m = identical_buyer_market();
  const PaymentResult vcg = vcg_payment(m, m.true_costs());
  const Eigen::MatrixXd t = redistribution_shares(m, m.true_costs(), vcg.seller_payments);
  for (Index j = 0; j < 2; ++j) CHECK(t(0, j) == doctest::Approx(t(1, j)).epsilon(1e-12));
}

TEST_CASE("redistribution is budget balanced per seller") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto m = build_random_mean_market(5, 10, 3, seed);
    const PaymentResult vcg = vcg_payment(m, m.true_costs());
    const Eigen::MatrixXd t = redistribution_shares(m, m.true_costs(), vcg.seller_payments);
    for (Index j = 0; j < 10; ++j) {
      CHECK(std::abs(t.col(j).sum() - vcg.seller_payments[static_cast<std::size_t>(j)]) <=
            1e-12);
    }
    PaymentResult with = vcg;
    attach_redistribution(m, m.true_costs(), with);
    REQUIRE(with.budget_gap);
    CHECK(std::abs(*with.budget_gap) <= 1e-12);
  }
}

TEST_CASE("buyers stay individually rational when the redistribution probe passes") {
  int passed = 0;
  for (std::uint64_t seed = 1; seed <= 40 && passed < 5; ++seed) {
    const auto m = build_random_mean_market(2, 2, 2, seed);
    if (!redistribution_probe(m, m.true_costs()).passes) continue;
    ++passed;
    for (Rule rule : {Rule::kVcg, Rule::kMyerson}) {
      PaymentResult r = compute_payment(m, rule, m.true_costs());
      attach_redistribution(m, m.true_costs(), r);
      for (double u : *r.buyer_utilities) CHECK(u >= -1e-9);
    }
  }
  CHECK(passed > 0);
}

TEST_CASE("zero denominators with a nonzero payment are degenerate") {
  const auto m = identical_buyer_market();
  // Seller 0 contributes nothing once its column is already zero.
  const CostVector c = m.true_costs().without(0);
  try {
    redistribution_shares(m, c, {1.0, 0.0});
    FAIL("expected DegenerateRedistribution");
  } catch (const DegenerateRedistribution& e) {
    CHECK(e.seller() == 0);
  }
  const Eigen::MatrixXd t = redistribution_shares(m, c, {0.0, 0.0});
  CHECK(t.col(0).isZero(0.0));
}

// ---------------------------------------------------------------------------
// Kernels

TEST_CASE("coalition tables agree between serial and parallel kernels") {
  const auto m = build_random_mean_market(3, 8, 2, 2);
  std::vector<Index> players{0, 1, 2, 3, 4, 5, 6, 7};
  const auto a = coalition_values(m, m.true_costs(), players, Execution::kSerial);
  const auto b = coalition_values(m, m.true_costs(), players, Execution::kParallel);
  CHECK(a == b);
  CHECK(a[0] == 0.0);
}

TEST_CASE("parallel loops rethrow the lowest failing index") {
  std::vector<int> hits(50, 0);
  try {
    for_each_index(50, Execution::kParallel, [&](Index i) {
      hits[static_cast<std::size_t>(i)] = 1;
      if (i == 7 || i == 30) throw InvalidArgument("boom " + std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()) == "boom 7");
  }
  int total = 0;
  for (int h : hits) total += h;
  CHECK(total == 50);
}

TEST_CASE("payment rules agree between serial and parallel execution") {
  const auto m = build_random_mean_market(5, 10, 3, 3);
  for (Rule rule : kAllRules) {
    PaymentOptions serial;
    serial.execution = Execution::kSerial;
    PaymentOptions parallel;
    parallel.execution = Execution::kParallel;
    CHECK(column_payments(compute_payment(m, rule, m.true_costs(), serial)) ==
          column_payments(compute_payment(m, rule, m.true_costs(), parallel)));
  }
}

}  // namespace
}  // namespace datamarket
