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

#include "datamarket/types.hpp"

#include <algorithm>
#include <cmath>

namespace datamarket {

namespace {

std::string join_violations(const std::vector<std::string>& violations) {
  std::string out = "invalid configuration";
  for (const auto& v : violations) out += "; " + v;
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

PlayerIds::PlayerIds(Index num_buyers, Index num_sellers)
    : buyers(num_buyers), sellers(num_sellers) {
  if (buyers < 1 || sellers < 1) {
    throw InvalidArgument("a market needs at least one buyer and one seller");
  }
}

CostVector::CostVector(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t j = 0; j < values_.size(); ++j) {
    const double c = values_[j];
    if (std::isnan(c) || c < 0.0) {
      throw InvalidArgument("cost of seller " + std::to_string(j) +
                            " must be >= 0, got " + std::to_string(c));
    }
  }
}

CostVector CostVector::with(Index j, double value) const {
  if (j < 0 || j >= size()) {
    throw InvalidArgument("seller index " + std::to_string(j) + " out of range");
  }
  std::vector<double> copy = values_;
  copy[static_cast<std::size_t>(j)] = value;
  return CostVector(std::move(copy));
}

CostVector CostVector::restricted_to(const std::vector<bool>& members) const {
  if (static_cast<Index>(members.size()) != size()) {
    throw ShapeMismatch("member mask has " + std::to_string(members.size()) +
                        " entries, expected " + std::to_string(size()));
  }
  std::vector<double> copy = values_;
  for (std::size_t j = 0; j < copy.size(); ++j) {
    if (!members[j]) copy[j] = kAbsent;
  }
  return CostVector(std::move(copy));
}

CostVector CostVector::scaled(double factor) const {
  std::vector<double> copy = values_;
  for (double& c : copy) {
    if (c != kAbsent) c *= factor;
  }
  return CostVector(std::move(copy));
}

double CostVector::max_finite() const {
  double best = 0.0;
  for (double c : values_) {
    if (c != kAbsent) best = std::max(best, c);
  }
  return best;
}

Allocation::Allocation(Eigen::MatrixXd matrix) : w(std::move(matrix)) {
  if (!w.allFinite()) throw InvalidArgument("allocation entries must be finite");
}

Allocation Allocation::zeros(Index buyers, Index sellers) {
  return Allocation(Eigen::MatrixXd::Zero(buyers, sellers));
}

Allocation Allocation::without_column(Index j) const {
  Allocation copy = *this;
  copy.w.col(j).setZero();
  return copy;
}

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::kDirect: return "direct";
    case Rule::kLoo: return "loo";
    case Rule::kShapley: return "shapley";
    case Rule::kMyerson: return "myerson";
    case Rule::kVcg: return "vcg";
  }
  return "unknown";
}

Rule parse_rule(std::string_view name) {
  for (Rule r : kAllRules) {
    if (to_string(r) == name) return r;
  }
  throw InvalidArgument("unknown payment rule '" + std::string(name) +
                        "' (expected direct|loo|shapley|myerson|vcg)");
}

}  // namespace datamarket
