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
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace datamarket {

using Index = Eigen::Index;

// Reported cost of a seller that has left the market.
inline constexpr double kAbsent = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual std::string_view kind() const { return "error"; }
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
  std::string_view kind() const override { return "invalid_argument"; }
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
  std::string_view kind() const override { return "shape_mismatch"; }
};

class ContractViolation : public Error {
 public:
  using Error::Error;
  std::string_view kind() const override { return "contract_violation"; }
};

class SingularSystemError : public Error {
 public:
  SingularSystemError(const std::string& what, double rcond)
      : Error(what), rcond_(rcond) {}
  std::string_view kind() const override { return "singular_system"; }
  double rcond() const { return rcond_; }

 private:
  double rcond_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}
  std::string_view kind() const override { return "convergence_failure"; }
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

class SizeRefusal : public Error {
 public:
  using Error::Error;
  std::string_view kind() const override { return "size_refusal"; }
};

class MissingScore : public Error {
 public:
  using Error::Error;
  std::string_view kind() const override { return "missing_score"; }
};

class TransportError : public Error {
 public:
  TransportError(const std::string& what, int attempts)
      : Error(what), attempts_(attempts) {}
  std::string_view kind() const override { return "transport_error"; }
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

class DegenerateRedistribution : public Error {
 public:
  DegenerateRedistribution(const std::string& what, Index seller)
      : Error(what), seller_(seller) {}
  std::string_view kind() const override { return "degenerate_redistribution"; }
  Index seller() const { return seller_; }

 private:
  Index seller_;
};

// Every violated invariant of a configuration, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  std::string_view kind() const override { return "validation_error"; }
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// ---------------------------------------------------------------------------
// Domain types

// Buyers and sellers live in separate index spaces, so the two sets are
// disjoint by construction.
struct PlayerIds {
  Index buyers = 0;
  Index sellers = 0;

  PlayerIds() = default;
  PlayerIds(Index num_buyers, Index num_sellers);
};

// Per-seller unit costs. Entries are >= 0; kAbsent marks a seller that is
// structurally excluded from the allocation.
class CostVector {
 public:
  CostVector() = default;
  explicit CostVector(std::vector<double> values);
  CostVector(std::initializer_list<double> values)
      : CostVector(std::vector<double>(values)) {}

  Index size() const { return static_cast<Index>(values_.size()); }
  double operator[](Index j) const { return values_[static_cast<std::size_t>(j)]; }
  bool absent(Index j) const { return (*this)[j] == kAbsent; }
  std::span<const double> values() const { return values_; }

  CostVector with(Index j, double value) const;
  CostVector without(Index j) const { return with(j, kAbsent); }
  // Marks every seller outside `members` absent.
  CostVector restricted_to(const std::vector<bool>& members) const;
  CostVector scaled(double factor) const;

  // Largest finite entry, 0 when every seller is absent.
  double max_finite() const;

  friend bool operator==(const CostVector&, const CostVector&) = default;

 private:
  std::vector<double> values_;
};

// |B| x |S| information-exchange matrix. Discrete markets use a single row
// of 0/1 entries.
struct Allocation {
  Eigen::MatrixXd w;

  Allocation() = default;
  explicit Allocation(Eigen::MatrixXd matrix);
  static Allocation zeros(Index buyers, Index sellers);

  Index buyers() const { return w.rows(); }
  Index sellers() const { return w.cols(); }
  double operator()(Index i, Index j) const { return w(i, j); }

  // Copy with column j set to zero and every other entry unchanged.
  Allocation without_column(Index j) const;
};

struct WelfareReport {
  std::vector<double> per_buyer_value;
  std::vector<double> per_seller_sharing;
  std::vector<double> per_seller_cost;
  double social_welfare = 0.0;
  double social_cost = 0.0;
};

enum class Rule { kDirect, kLoo, kShapley, kMyerson, kVcg };

std::string_view to_string(Rule rule);
Rule parse_rule(std::string_view name);
inline constexpr Rule kAllRules[] = {Rule::kDirect, Rule::kLoo, Rule::kShapley,
                                     Rule::kMyerson, Rule::kVcg};

struct PaymentResult {
  Rule rule = Rule::kDirect;
  std::vector<double> seller_payments;
  std::optional<std::vector<double>> buyer_charges;
  std::vector<double> seller_utilities;
  std::optional<std::vector<double>> buyer_utilities;
  // Sum of buyer charges minus sum of seller payments; set with charges.
  std::optional<double> budget_gap;
  // Allocation at the reported costs, valued at the true costs.
  WelfareReport welfare;
  // Myerson: quadrature + tail error per seller. Sampled Shapley: standard
  // error per seller. Empty for the other rules.
  std::vector<double> error_estimates;
  // Myerson only: the integral hit the hard cap before the tail decayed.
  std::vector<bool> truncated;
};

}  // namespace datamarket
