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

#include "datamarket/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace datamarket {

namespace {

std::vector<Index> finite_columns(const CostVector& costs) {
  std::vector<Index> active;
  for (Index j = 0; j < costs.size(); ++j) {
    if (!costs.absent(j)) active.push_back(j);
  }
  return active;
}

void check_mean_shapes(const Eigen::MatrixXd& b_mat, const Eigen::MatrixXd& c_mat,
                       const Eigen::VectorXd& v_diag, const CostVector& costs) {
  const Index ns = b_mat.cols();
  if (c_mat.rows() != ns || c_mat.cols() != ns || v_diag.size() != ns ||
      costs.size() != ns) {
    throw ShapeMismatch("mean-estimation system: B is " +
                        std::to_string(b_mat.rows()) + "x" + std::to_string(ns) +
                        ", C is " + std::to_string(c_mat.rows()) + "x" +
                        std::to_string(c_mat.cols()) + ", V has " +
                        std::to_string(v_diag.size()) + ", costs have " +
                        std::to_string(costs.size()));
  }
  const double scale = std::max(1.0, c_mat.cwiseAbs().maxCoeff());
  if ((c_mat - c_mat.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw InvalidArgument("C must be symmetric");
  }
  if ((v_diag.array() < 0.0).any()) {
    throw InvalidArgument("seller variances must be >= 0");
  }
}

struct ReducedSystem {
  std::vector<Index> active;
  Eigen::LLT<Eigen::MatrixXd> factor;
};

ReducedSystem factor_reduced(const Eigen::MatrixXd& c_mat, const Eigen::VectorXd& v_diag,
                             const CostVector& costs) {
  ReducedSystem sys;
  sys.active = finite_columns(costs);
  const auto n = static_cast<Index>(sys.active.size());
  Eigen::MatrixXd m(n, n);
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) {
      m(a, b) = c_mat(sys.active[a], sys.active[b]);
    }
    m(a, a) += v_diag(sys.active[a]) + costs[sys.active[a]];
  }
  if (n == 0) return sys;
  sys.factor.compute(m);
  const double rcond =
      sys.factor.info() == Eigen::Success ? sys.factor.rcond() : 0.0;
  if (sys.factor.info() != Eigen::Success || !(rcond > 1e-13)) {
    std::ostringstream msg;
    msg << "C + V + A over " << n
        << " active sellers is singular or not positive definite"
        << " (reciprocal condition estimate " << rcond << ")";
    throw SingularSystemError(msg.str(), rcond);
  }
  return sys;
}

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& m, const std::vector<Index>& cols) {
  Eigen::MatrixXd out(m.rows(), static_cast<Index>(cols.size()));
  for (std::size_t a = 0; a < cols.size(); ++a) out.col(static_cast<Index>(a)) = m.col(cols[a]);
  return out;
}

}  // namespace

void SolverSettings::validate() const {
  if (!(gradient_tolerance > 0.0)) throw InvalidArgument("gradient_tolerance must be > 0");
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
  if (!(initial_step > 0.0)) throw InvalidArgument("initial_step must be > 0");
}

Allocation solve_mean_estimation(const Eigen::MatrixXd& b_mat,
                                 const Eigen::MatrixXd& c_mat,
                                 const Eigen::VectorXd& v_diag,
                                 const CostVector& costs) {
  check_mean_shapes(b_mat, c_mat, v_diag, costs);
  const ReducedSystem sys = factor_reduced(c_mat, v_diag, costs);
  Allocation out = Allocation::zeros(b_mat.rows(), b_mat.cols());
  if (sys.active.empty()) return out;
  // M is symmetric, so W_act^T = M^{-1} B_act^T.
  const Eigen::MatrixXd w_act =
      sys.factor.solve(gather_columns(b_mat, sys.active).transpose()).transpose();
  for (std::size_t a = 0; a < sys.active.size(); ++a) {
    out.w.col(sys.active[a]) = w_act.col(static_cast<Index>(a));
  }
  return out;
}

MeanEstimationCostPath::MeanEstimationCostPath(const Market& market,
                                               const Eigen::MatrixXd& b_mat,
                                               const Eigen::MatrixXd& c_mat,
                                               const Eigen::VectorXd& v_diag,
                                               const CostVector& reported,
                                               Index seller)
    : CostPath(market, seller), reference_cost_(reported[seller]) {
  if (reported.absent(seller)) {
    throw InvalidArgument("the closed-form cost path needs a finite reference cost");
  }
  check_mean_shapes(b_mat, c_mat, v_diag, reported);
  const ReducedSystem sys = factor_reduced(c_mat, v_diag, reported);
  const auto n = static_cast<Index>(sys.active.size());
  const auto pos = static_cast<Index>(
      std::find(sys.active.begin(), sys.active.end(), seller) - sys.active.begin());
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(n);
  unit(pos) = 1.0;
  const Eigen::VectorXd row = sys.factor.solve(unit);
  inverse_row_ = Eigen::VectorXd::Zero(b_mat.cols());
  for (Index a = 0; a < n; ++a) inverse_row_(sys.active[a]) = row(a);
  inverse_diag_ = row(pos);
  const Eigen::MatrixXd w_act =
      sys.factor.solve(gather_columns(b_mat, sys.active).transpose()).transpose();
  w0_ = Eigen::MatrixXd::Zero(b_mat.rows(), b_mat.cols());
  for (Index a = 0; a < n; ++a) w0_.col(sys.active[a]) = w_act.col(a);
  reference_sharing_ = w0_.col(seller).squaredNorm();
}

Allocation MeanEstimationCostPath::at(double u) const {
  if (std::isnan(u) || u < 0.0) throw InvalidArgument("reported cost must be >= 0");
  double coef;
  if (u == kAbsent) {
    coef = 1.0 / inverse_diag_;
  } else {
    const double d = u - reference_cost_;
    coef = d / (1.0 + d * inverse_diag_);
  }
  Eigen::MatrixXd w = w0_ - coef * w0_.col(seller_) * inverse_row_.transpose();
  if (u == kAbsent) w.col(seller_).setZero();
  return Allocation(std::move(w));
}

double MeanEstimationCostPath::sharing_at(double u) const {
  if (u == kAbsent) return 0.0;
  const double scale = 1.0 + (u - reference_cost_) * inverse_diag_;
  return reference_sharing_ / (scale * scale);
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  const Index n = v.size();
  if (n == 0) return v;
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Index r = 0; r < n; ++r) {
    cumulative += sorted[static_cast<std::size_t>(r)];
    const double candidate = (cumulative - 1.0) / static_cast<double>(r + 1);
    if (sorted[static_cast<std::size_t>(r)] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).max(0.0).matrix();
}

namespace {

// Projection onto the feasible set: absent columns pinned to zero and, for
// simplex markets, each row restricted to the probability simplex.
class FeasibleSet {
 public:
  FeasibleSet(Domain domain, const CostVector& costs)
      : domain_(domain), active_(finite_columns(costs)), num_sellers_(costs.size()) {}

  bool empty() const { return active_.empty(); }

  Eigen::MatrixXd project(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    if (domain_ == Domain::kSimplex) {
      Eigen::VectorXd row(static_cast<Index>(active_.size()));
      for (Index i = 0; i < x.rows(); ++i) {
        for (std::size_t a = 0; a < active_.size(); ++a) row(static_cast<Index>(a)) = x(i, active_[a]);
        const Eigen::VectorXd p = project_to_simplex(row);
        for (std::size_t a = 0; a < active_.size(); ++a) out(i, active_[a]) = p(static_cast<Index>(a));
      }
    } else {
      for (Index j : active_) out.col(j) = x.col(j);
    }
    return out;
  }

  Eigen::MatrixXd start(Index buyers) const {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(buyers, num_sellers_);
    if (domain_ == Domain::kSimplex) {
      for (Index j : active_) x.col(j).setConstant(1.0 / static_cast<double>(active_.size()));
    }
    return x;
  }

 private:
  Domain domain_;
  std::vector<Index> active_;
  Index num_sellers_;
};

double residual_of(const FeasibleSet& set, const Eigen::MatrixXd& x,
                   const Eigen::MatrixXd& ascent) {
  return (x - set.project(x + ascent)).cwiseAbs().maxCoeff();
}

}  // namespace

double projected_gradient_residual(const ContinuousMarket& market,
                                   const Allocation& w, const CostVector& costs) {
  const FeasibleSet set(market.domain(), costs);
  if (set.empty()) return 0.0;
  return residual_of(set, w.w, market.welfare_gradient(w, costs));
}

Allocation solve_numeric(const ContinuousMarket& market, const CostVector& costs,
                         const SolverSettings& settings) {
  settings.validate();
  if (market.domain() == Domain::kDiscrete) {
    throw InvalidArgument("solve_numeric needs a continuous market");
  }
  if (costs.size() != market.num_sellers()) {
    throw ShapeMismatch("cost vector does not match the number of sellers");
  }
  const Index nb = market.num_buyers();
  const FeasibleSet set(market.domain(), costs);
  if (set.empty()) return Allocation::zeros(nb, market.num_sellers());

  // Minimize g = -SW with FISTA. Backtracking and restarts use gradients
  // only; objective differences fall below rounding long before the
  // residual reaches typical tolerances.
  auto descent = [&](const Eigen::MatrixXd& x) {
    return Eigen::MatrixXd(-market.welfare_gradient(Allocation(x), costs));
  };

  Eigen::MatrixXd x = set.project(set.start(nb));
  Eigen::MatrixXd y = x;
  Eigen::MatrixXd grad_y = descent(y);
  double momentum = 1.0;
  double step = settings.initial_step;
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < settings.max_iterations; ++it) {
    Eigen::MatrixXd next;
    Eigen::MatrixXd grad_next;
    for (;;) {
      next = set.project(y - step * grad_y);
      grad_next = descent(next);
      if (settings.step_rule == StepRule::kFixed) break;
      const Eigen::MatrixXd diff = next - y;
      const double moved = diff.squaredNorm();
      if (moved == 0.0 ||
          ((grad_next - grad_y).array() * diff.array()).sum() <= moved / step) {
        break;
      }
      step *= 0.5;
      if (step < 1e-300) break;
    }
    residual = residual_of(set, next, -grad_next);
    if (residual <= settings.gradient_tolerance) return Allocation(next);
    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    const bool restart = ((y - next).array() * (next - x).array()).sum() > 0.0;
    if (restart) {
      momentum = 1.0;
      y = next;
      grad_y = grad_next;
    } else {
      y = next + ((momentum - 1.0) / next_momentum) * (next - x);
      momentum = next_momentum;
      grad_y = descent(y);
    }
    x = std::move(next);
  }
  std::ostringstream msg;
  msg << "projected gradient did not converge in " << settings.max_iterations
      << " iterations (residual " << residual << ", tolerance "
      << settings.gradient_tolerance << ")";
  throw ConvergenceError(msg.str(), residual, settings.max_iterations);
}

std::vector<bool> solve_discrete(std::span<const double> scores,
                                 std::span<const double> costs, Index k) {
  if (scores.size() != costs.size()) {
    throw ShapeMismatch("scores and costs differ in length");
  }
  if (k < 1) throw InvalidArgument("retrieval budget k must be >= 1");
  std::vector<std::size_t> order;
  std::vector<double> phi(scores.size(), 0.0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (costs[i] == kAbsent) continue;
    phi[i] = scores[i] - costs[i];
    if (phi[i] > 0.0) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return phi[a] > phi[b]; });
  std::vector<bool> selected(scores.size(), false);
  for (std::size_t r = 0; r < order.size() && static_cast<Index>(r) < k; ++r) {
    selected[order[r]] = true;
  }
  return selected;
}

}  // namespace datamarket
