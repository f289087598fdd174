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
#include <vector>

#include "datamarket/allocation.hpp"
#include "datamarket/market.hpp"
#include "datamarket/score_oracle.hpp"

namespace datamarket {

// Buyers estimate their means from the sellers' noisy unbiased estimates.
// With B_ij = <mu_i, mu_j>, C_jk = <mu_j, mu_k>, V = diag(sigma^2):
//   l_i(W)  = |mu_i|^2 - 2 W_i B_i^T + W_i (C + V) W_i^T
//   v_i(W)  = l_i(0) - l_i(W)
//   f_j(W)  = sum_i w_ij^2
class MeanEstimationMarket final : public ContinuousMarket {
 public:
  MeanEstimationMarket(Eigen::MatrixXd buyer_means, Eigen::MatrixXd seller_means,
                       Eigen::VectorXd seller_variances, CostVector true_costs,
                       std::optional<std::uint64_t> seed = std::nullopt);

  std::string_view family() const override { return "mean"; }
  Domain domain() const override { return Domain::kUnconstrained; }
  Index num_buyers() const override { return buyer_means_.rows(); }
  double performance(Index buyer, const Allocation& w) const override;
  double sharing(Index seller, const Allocation& w) const override;
  double standalone_loss(Index buyer) const override;
  Allocation solve(const CostVector& reported) const override;
  std::unique_ptr<CostPath> cost_path(const CostVector& reported,
                                      Index seller) const override;
  Eigen::MatrixXd welfare_gradient(const Allocation& w,
                                   const CostVector& reported) const override;

  const Eigen::MatrixXd& buyer_means() const { return buyer_means_; }
  const Eigen::MatrixXd& seller_means() const { return seller_means_; }
  const Eigen::VectorXd& seller_variances() const { return seller_variances_; }
  const Eigen::MatrixXd& b_mat() const { return b_mat_; }
  const Eigen::MatrixXd& c_mat() const { return c_mat_; }
  Index dimension() const { return buyer_means_.cols(); }

 private:
  Eigen::MatrixXd buyer_means_;
  Eigen::MatrixXd seller_means_;
  Eigen::VectorXd seller_variances_;
  Eigen::MatrixXd b_mat_;
  Eigen::MatrixXd c_mat_;
  Eigen::MatrixXd q_mat_;  // C + V
};

// Single buyer choosing data-mixture proportions w on the simplex with loss
// L(w) = b + k exp(t . w); v(w) = L(0) - L(w), f_j(w) = w_j^2.
class DataMixtureMarket final : public ContinuousMarket {
 public:
  DataMixtureMarket(double loss_floor, double loss_scale, Eigen::VectorXd effect_vector,
                    CostVector true_costs, std::optional<std::uint64_t> seed = std::nullopt,
                    SolverSettings settings = {});

  std::string_view family() const override { return "mixture"; }
  Domain domain() const override { return Domain::kSimplex; }
  Index num_buyers() const override { return 1; }
  double performance(Index buyer, const Allocation& w) const override;
  double sharing(Index seller, const Allocation& w) const override;
  double standalone_loss(Index buyer) const override;
  Allocation solve(const CostVector& reported) const override;
  Eigen::MatrixXd welfare_gradient(const Allocation& w,
                                   const CostVector& reported) const override;

  double loss(const Allocation& w) const;
  double loss_floor() const { return loss_floor_; }
  double loss_scale() const { return loss_scale_; }
  const Eigen::VectorXd& effect_vector() const { return effect_vector_; }
  const SolverSettings& settings() const { return settings_; }

 private:
  double loss_floor_;
  double loss_scale_;
  Eigen::VectorXd effect_vector_;
  SolverSettings settings_;
};

// Retrieval-augmented generation market. The top pool_size documents by
// relevance form the candidate pool; at most `budget` of them are kept by
// cost-aware reranking on independently scored documents. The buyer's value
// is the judge score of the kept set relative to the no-context baseline;
// f_j(w) = w_j.
class RetrievalMarket final : public Market {
 public:
  RetrievalMarket(std::vector<double> relevance, Index pool_size, Index budget,
                  CostVector true_costs, std::shared_ptr<const ScoreOracle> oracle,
                  DocumentIds ids = {}, std::optional<std::uint64_t> seed = std::nullopt);

  std::string_view family() const override { return "retrieval"; }
  Domain domain() const override { return Domain::kDiscrete; }
  Index num_buyers() const override { return 1; }
  double performance(Index buyer, const Allocation& w) const override;
  double sharing(Index seller, const Allocation& w) const override;
  double standalone_loss(Index buyer) const override;
  Allocation solve(const CostVector& reported) const override;
  bool is_candidate(Index seller) const override;

  Index corpus_size() const { return static_cast<Index>(relevance_.size()); }
  Index pool_size() const { return pool_size_; }
  Index budget() const { return budget_; }
  const std::vector<double>& relevance() const { return relevance_; }
  const std::vector<Index>& pool() const { return pool_; }
  // Singleton score minus baseline, per corpus document (0 outside the pool).
  const std::vector<double>& gains() const { return gains_; }
  const ScoreOracle& oracle() const { return *oracle_; }
  std::shared_ptr<const ScoreOracle> oracle_handle() const { return oracle_; }
  const DocumentIds& ids() const { return ids_; }
  double baseline() const { return baseline_; }
  std::vector<Index> selected(const Allocation& w) const;

 private:
  std::vector<double> relevance_;
  Index pool_size_;
  Index budget_;
  std::shared_ptr<const ScoreOracle> oracle_;
  DocumentIds ids_;
  std::vector<Index> pool_;
  std::vector<bool> in_pool_;
  std::vector<double> gains_;
  double baseline_;
};

// Indices of the n most relevant documents, most relevant first, ties to the
// lower index.
std::vector<Index> retrieve_pool(std::span<const double> relevance, Index n);
std::vector<Index> retrieve_pool(const RetrievalMarket& market);

// Means ~ Normal(1, 1) per coordinate, sigma^2 ~ Uniform[0, 1),
// costs ~ Uniform[1, 10]; drawn in that order (buyer means row by row, then
// seller means, variances, costs) from Rng(seed).
MeanEstimationMarket build_random_mean_market(Index buyers, Index sellers,
                                              Index dimension, std::uint64_t seed);

// loss_floor ~ U[0, 1), loss_scale ~ U[1, 3), t_j ~ -U[0.5, 3),
// costs ~ U[0.1, 1).
DataMixtureMarket build_random_mixture_market(Index sellers, std::uint64_t seed);

// Corpus of `corpus` documents with relevance ~ U[0, 1), singleton scores
// ~ U[0, 10 / budget) over a zero baseline (independence mode), so any
// selection stays below the score cap, and costs ~ U[0.01, 6 / budget).
RetrievalMarket build_random_retrieval_market(Index corpus, Index pool_size,
                                              Index budget, std::uint64_t seed);

}  // namespace datamarket
