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
#include <span>
#include <vector>

#include "datamarket/market.hpp"
#include "datamarket/types.hpp"

namespace datamarket {

enum class StepRule { kFixed, kBacktracking };

struct SolverSettings {
  double gradient_tolerance = 1e-8;  // bound on the projected-gradient residual
  int max_iterations = 10000;
  StepRule step_rule = StepRule::kBacktracking;
  double initial_step = 1.0;  // the fixed step when step_rule == kFixed
  std::uint64_t random_seed = 0;

  void validate() const;
};

// W = B (C + V + A)^{-1}, A = diag(costs). Columns with absent cost are zero
// and are removed from the system before factorization.
// Throws SingularSystemError when the reduced system is numerically singular.
Allocation solve_mean_estimation(const Eigen::MatrixXd& b_mat,
                                 const Eigen::MatrixXd& c_mat,
                                 const Eigen::VectorXd& v_diag,
                                 const CostVector& costs);

// Closed-form solutions along one seller's cost with the factor of
// (C + V + A) computed once at the reference reports. Moving seller j's cost
// from u0 to u is a rank-one change of the diagonal, so
//   W(u) = W0 - d/(1 + d m_jj) * W0[:, j] * Minv[j, :],   d = u - u0,
// with the d -> infinity limit giving the market without seller j.
class MeanEstimationCostPath final : public CostPath {
 public:
  MeanEstimationCostPath(const Market& market, const Eigen::MatrixXd& b_mat,
                         const Eigen::MatrixXd& c_mat,
                         const Eigen::VectorXd& v_diag,
                         const CostVector& reported, Index seller);

  Allocation at(double u) const override;
  double sharing_at(double u) const override;

 private:
  double reference_cost_;
  Eigen::MatrixXd w0_;
  Eigen::VectorXd inverse_row_;  // row j of (C+V+A)^{-1}, zero on absent columns
  double inverse_diag_;          // (C+V+A)^{-1}_{jj}
  double reference_sharing_;
};

// Projected (accelerated) gradient ascent on the reported social welfare.
// Unconstrained markets project onto R^{|B|x|S|}; simplex markets project
// each row onto the probability simplex over the non-absent sellers.
// Throws ConvergenceError carrying the last residual.
Allocation solve_numeric(const ContinuousMarket& market, const CostVector& costs,
                         const SolverSettings& settings = {});

// ||W - P(W + grad SW(W))||_inf with absent columns ignored.
double projected_gradient_residual(const ContinuousMarket& market,
                                   const Allocation& w, const CostVector& costs);

// Euclidean projection of v onto {x >= 0, sum x = 1}.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

// Cost-aware top-k selection under independent scoring: candidate i has
// welfare phi_i = scores[i] - costs[i]; the (at most k) candidates with the
// largest strictly positive phi are selected, ties to the lower index.
// Candidates with absent cost are never selected. Returns one flag per
// candidate.
std::vector<bool> solve_discrete(std::span<const double> scores,
                                 std::span<const double> costs, Index k);

}  // namespace datamarket
