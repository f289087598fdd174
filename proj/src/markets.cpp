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

#include "datamarket/markets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "datamarket/rng.hpp"

namespace datamarket {

namespace {

void check_buyer(Index buyer, Index count) {
  if (buyer < 0 || buyer >= count) {
    throw InvalidArgument("buyer index " + std::to_string(buyer) + " out of range");
  }
}

void check_shape(const Allocation& w, Index buyers, Index sellers) {
  if (w.buyers() != buyers || w.sellers() != sellers) {
    throw ShapeMismatch("allocation is " + std::to_string(w.buyers()) + "x" +
                        std::to_string(w.sellers()) + ", expected " +
                        std::to_string(buyers) + "x" + std::to_string(sellers));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Mean estimation

MeanEstimationMarket::MeanEstimationMarket(Eigen::MatrixXd buyer_means,
                                           Eigen::MatrixXd seller_means,
                                           Eigen::VectorXd seller_variances,
                                           CostVector true_costs,
                                           std::optional<std::uint64_t> seed)
    : ContinuousMarket(std::move(true_costs), seed),
      buyer_means_(std::move(buyer_means)),
      seller_means_(std::move(seller_means)),
      seller_variances_(std::move(seller_variances)) {
  std::vector<std::string> violations;
  if (buyer_means_.rows() < 1) violations.push_back("buyer_means needs >= 1 row");
  if (seller_means_.rows() != num_sellers()) {
    violations.push_back("seller_means has " + std::to_string(seller_means_.rows()) +
                         " rows but there are " + std::to_string(num_sellers()) +
                         " costs");
  }
  if (buyer_means_.cols() != seller_means_.cols() || buyer_means_.cols() < 1) {
    violations.push_back("buyer and seller means must share a dimension >= 1");
  }
  if (seller_variances_.size() != num_sellers()) {
    violations.push_back("seller_variances must have one entry per seller");
  } else if ((seller_variances_.array() < 0.0).any() || !seller_variances_.allFinite()) {
    violations.push_back("seller_variances must be finite and >= 0");
  }
  if (!buyer_means_.allFinite() || !seller_means_.allFinite()) {
    violations.push_back("means must be finite");
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
  b_mat_ = buyer_means_ * seller_means_.transpose();
  c_mat_ = seller_means_ * seller_means_.transpose();
  q_mat_ = c_mat_;
  q_mat_.diagonal() += seller_variances_;
  market_contract(*this);
}

double MeanEstimationMarket::performance(Index buyer, const Allocation& w) const {
  check_buyer(buyer, num_buyers());
  check_shape(w, num_buyers(), num_sellers());
  const Eigen::RowVectorXd row = w.w.row(buyer);
  return 2.0 * row.dot(b_mat_.row(buyer)) - row * q_mat_ * row.transpose();
}

double MeanEstimationMarket::sharing(Index seller, const Allocation& w) const {
  check_shape(w, num_buyers(), num_sellers());
  return w.w.col(seller).squaredNorm();
}

double MeanEstimationMarket::standalone_loss(Index buyer) const {
  check_buyer(buyer, num_buyers());
  return buyer_means_.row(buyer).squaredNorm();
}

Allocation MeanEstimationMarket::solve(const CostVector& reported) const {
  return solve_mean_estimation(b_mat_, c_mat_, seller_variances_, reported);
}

std::unique_ptr<CostPath> MeanEstimationMarket::cost_path(const CostVector& reported,
                                                          Index seller) const {
  if (reported.absent(seller)) return Market::cost_path(reported, seller);
  return std::make_unique<MeanEstimationCostPath>(*this, b_mat_, c_mat_,
                                                  seller_variances_, reported, seller);
}

Eigen::MatrixXd MeanEstimationMarket::welfare_gradient(const Allocation& w,
                                                       const CostVector& reported) const {
  check_shape(w, num_buyers(), num_sellers());
  Eigen::MatrixXd grad = 2.0 * b_mat_ - 2.0 * w.w * q_mat_;
  for (Index j = 0; j < num_sellers(); ++j) {
    if (reported.absent(j)) {
      grad.col(j).setZero();
    } else {
      grad.col(j) -= 2.0 * reported[j] * w.w.col(j);
    }
  }
  return grad;
}

// ---------------------------------------------------------------------------
// Data mixture

DataMixtureMarket::DataMixtureMarket(double loss_floor, double loss_scale,
                                     Eigen::VectorXd effect_vector,
                                     CostVector true_costs,
                                     std::optional<std::uint64_t> seed,
                                     SolverSettings settings)
    : ContinuousMarket(std::move(true_costs), seed),
      loss_floor_(loss_floor),
      loss_scale_(loss_scale),
      effect_vector_(std::move(effect_vector)),
      settings_(settings) {
  std::vector<std::string> violations;
  if (!std::isfinite(loss_floor_)) violations.push_back("loss_floor must be finite");
  if (!(loss_scale_ > 0.0) || !std::isfinite(loss_scale_)) {
    violations.push_back("loss_scale must be finite and > 0");
  }
  if (effect_vector_.size() != num_sellers()) {
    violations.push_back("effect_vector must have one entry per seller");
  } else if (!effect_vector_.allFinite()) {
    violations.push_back("effect_vector must be finite");
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
  settings_.validate();
  market_contract(*this);
}

double DataMixtureMarket::loss(const Allocation& w) const {
  check_shape(w, 1, num_sellers());
  return loss_floor_ + loss_scale_ * std::exp(w.w.row(0).dot(effect_vector_));
}

double DataMixtureMarket::performance(Index buyer, const Allocation& w) const {
  check_buyer(buyer, 1);
  check_shape(w, 1, num_sellers());
  return -loss_scale_ * std::expm1(w.w.row(0).dot(effect_vector_));
}

double DataMixtureMarket::sharing(Index seller, const Allocation& w) const {
  check_shape(w, 1, num_sellers());
  return w(0, seller) * w(0, seller);
}

double DataMixtureMarket::standalone_loss(Index buyer) const {
  check_buyer(buyer, 1);
  return loss_floor_ + loss_scale_;
}

Allocation DataMixtureMarket::solve(const CostVector& reported) const {
  return solve_numeric(*this, reported, settings_);
}

Eigen::MatrixXd DataMixtureMarket::welfare_gradient(const Allocation& w,
                                                    const CostVector& reported) const {
  check_shape(w, 1, num_sellers());
  const double scale = loss_scale_ * std::exp(w.w.row(0).dot(effect_vector_));
  Eigen::MatrixXd grad(1, num_sellers());
  for (Index j = 0; j < num_sellers(); ++j) {
    grad(0, j) = reported.absent(j)
                     ? 0.0
                     : -scale * effect_vector_(j) - 2.0 * reported[j] * w(0, j);
  }
  return grad;
}

// ---------------------------------------------------------------------------
// Retrieval

std::vector<Index> retrieve_pool(std::span<const double> relevance, Index n) {
  if (n < 0) throw InvalidArgument("pool size must be >= 0");
  std::vector<Index> order(relevance.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return relevance[static_cast<std::size_t>(a)] > relevance[static_cast<std::size_t>(b)];
  });
  order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(n)));
  return order;
}

std::vector<Index> retrieve_pool(const RetrievalMarket& market) {
  return retrieve_pool(market.relevance(), market.pool_size());
}

RetrievalMarket::RetrievalMarket(std::vector<double> relevance, Index pool_size,
                                 Index budget, CostVector true_costs,
                                 std::shared_ptr<const ScoreOracle> oracle,
                                 DocumentIds ids, std::optional<std::uint64_t> seed)
    : Market(std::move(true_costs), seed),
      relevance_(std::move(relevance)),
      pool_size_(pool_size),
      budget_(budget),
      oracle_(std::move(oracle)),
      ids_(ids.size() == 0 ? DocumentIds::numbered(num_sellers()) : std::move(ids)) {
  std::vector<std::string> violations;
  const Index s = num_sellers();
  if (static_cast<Index>(relevance_.size()) != s) {
    violations.push_back("relevance must have one entry per document (" +
                         std::to_string(s) + ")");
  }
  for (double r : relevance_) {
    if (!std::isfinite(r)) {
      violations.push_back("relevance scores must be finite");
      break;
    }
  }
  if (budget_ < 1) violations.push_back("budget k must be >= 1");
  if (pool_size_ < budget_) violations.push_back("pool_size n must be >= budget k");
  if (pool_size_ > s) violations.push_back("pool_size n must be <= corpus size s");
  if (ids_.size() != s) violations.push_back("document_ids must name every document");
  if (!oracle_) violations.push_back("a score oracle is required");
  if (!violations.empty()) throw ValidationError(std::move(violations));

  pool_ = retrieve_pool(relevance_, pool_size_);
  in_pool_.assign(static_cast<std::size_t>(s), false);
  for (Index d : pool_) in_pool_[static_cast<std::size_t>(d)] = true;
  baseline_ = score_subset(*oracle_, {});
  gains_.assign(static_cast<std::size_t>(s), 0.0);
  for (Index d : pool_) {
    const Index single[] = {d};
    gains_[static_cast<std::size_t>(d)] = score_subset(*oracle_, single) - baseline_;
  }
  market_contract(*this);
}

bool RetrievalMarket::is_candidate(Index seller) const {
  return in_pool_.at(static_cast<std::size_t>(seller));
}

std::vector<Index> RetrievalMarket::selected(const Allocation& w) const {
  check_shape(w, 1, num_sellers());
  std::vector<Index> out;
  for (Index j = 0; j < num_sellers(); ++j) {
    if (w(0, j) != 0.0) out.push_back(j);
  }
  return out;
}

double RetrievalMarket::performance(Index buyer, const Allocation& w) const {
  check_buyer(buyer, 1);
  const std::vector<Index> docs = selected(w);
  if (docs.empty()) return 0.0;
  return score_subset(*oracle_, docs) - baseline_;
}

double RetrievalMarket::sharing(Index seller, const Allocation& w) const {
  check_shape(w, 1, num_sellers());
  return w(0, seller);
}

double RetrievalMarket::standalone_loss(Index buyer) const {
  check_buyer(buyer, 1);
  return 10.0 - baseline_;
}

Allocation RetrievalMarket::solve(const CostVector& reported) const {
  if (reported.size() != num_sellers()) {
    throw ShapeMismatch("cost vector does not match the corpus size");
  }
  std::vector<double> scores;
  std::vector<double> costs;
  for (Index d : pool_) {
    scores.push_back(gains_[static_cast<std::size_t>(d)]);
    costs.push_back(reported[d]);
  }
  // solve_discrete breaks ties by candidate position; present the pool in
  // corpus order so ties go to the lowest document index.
  std::vector<std::size_t> order(pool_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pool_[a] < pool_[b]; });
  std::vector<double> s_sorted, c_sorted;
  for (std::size_t a : order) {
    s_sorted.push_back(scores[a]);
    c_sorted.push_back(costs[a]);
  }
  const std::vector<bool> pick = solve_discrete(s_sorted, c_sorted, budget_);
  Allocation out = Allocation::zeros(1, num_sellers());
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (pick[r]) out.w(0, pool_[order[r]]) = 1.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generators

MeanEstimationMarket build_random_mean_market(Index buyers, Index sellers,
                                              Index dimension, std::uint64_t seed) {
  if (buyers < 1 || sellers < 1 || dimension < 1) {
    throw InvalidArgument("buyers, sellers and dimension must be >= 1");
  }
  Rng rng(seed);
  Eigen::MatrixXd buyer_means(buyers, dimension);
  for (Index i = 0; i < buyers; ++i)
    for (Index d = 0; d < dimension; ++d) buyer_means(i, d) = rng.normal(1.0, 1.0);
  Eigen::MatrixXd seller_means(sellers, dimension);
  for (Index j = 0; j < sellers; ++j)
    for (Index d = 0; d < dimension; ++d) seller_means(j, d) = rng.normal(1.0, 1.0);
  Eigen::VectorXd variances(sellers);
  for (Index j = 0; j < sellers; ++j) variances(j) = rng.uniform();
  std::vector<double> costs(static_cast<std::size_t>(sellers));
  for (double& c : costs) c = rng.uniform(1.0, 10.0);
  return MeanEstimationMarket(std::move(buyer_means), std::move(seller_means),
                              std::move(variances), CostVector(std::move(costs)), seed);
}

DataMixtureMarket build_random_mixture_market(Index sellers, std::uint64_t seed) {
  if (sellers < 1) throw InvalidArgument("sellers must be >= 1");
  Rng rng(seed);
  const double floor = rng.uniform();
  const double scale = rng.uniform(1.0, 3.0);
  Eigen::VectorXd effect(sellers);
  for (Index j = 0; j < sellers; ++j) effect(j) = -rng.uniform(0.5, 3.0);
  std::vector<double> costs(static_cast<std::size_t>(sellers));
  for (double& c : costs) c = rng.uniform(0.1, 1.0);
  return DataMixtureMarket(floor, scale, std::move(effect), CostVector(std::move(costs)),
                           seed);
}

RetrievalMarket build_random_retrieval_market(Index corpus, Index pool_size, Index budget,
                                              std::uint64_t seed) {
  if (corpus < 1) throw InvalidArgument("corpus must be >= 1");
  if (budget < 1) throw InvalidArgument("budget must be >= 1");
  const double top = 10.0 / static_cast<double>(budget);
  Rng rng(seed);
  std::vector<double> relevance(static_cast<std::size_t>(corpus));
  for (double& r : relevance) r = rng.uniform();
  std::map<std::vector<Index>, double> entries;
  for (Index d = 0; d < corpus; ++d) entries[{d}] = rng.uniform(0.0, top);
  std::vector<double> costs(static_cast<std::size_t>(corpus));
  for (double& c : costs) c = rng.uniform(0.01, 0.6 * top);
  DocumentIds ids = DocumentIds::numbered(corpus);
  auto oracle = std::make_shared<TableScoreOracle>(std::move(entries), ids, true);
  return RetrievalMarket(std::move(relevance), pool_size, budget,
                         CostVector(std::move(costs)), std::move(oracle), std::move(ids),
                         seed);
}

}  // namespace datamarket
