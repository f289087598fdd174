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

#include <chrono>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "datamarket/types.hpp"

namespace datamarket {

// Names of the documents in a corpus; index i <-> ids[i].
class DocumentIds {
 public:
  DocumentIds() = default;
  explicit DocumentIds(std::vector<std::string> ids);
  // d1, d2, ..., d<count>.
  static DocumentIds numbered(Index count);

  Index size() const { return static_cast<Index>(ids_.size()); }
  const std::string& operator[](Index i) const { return ids_[static_cast<std::size_t>(i)]; }
  Index index_of(const std::string& id) const;  // throws InvalidArgument
  const std::vector<std::string>& ids() const { return ids_; }

  // "d1+d3" for {0, 2}; "" for the empty subset.
  std::string subset_key(std::span<const Index> subset) const;
  // Parses a '+'-joined key into sorted indices.
  std::vector<Index> parse_subset(const std::string& key) const;

 private:
  std::vector<std::string> ids_;
  std::map<std::string, Index> lookup_;
};

// Stand-in for the response judge: maps a document subset (sorted corpus
// indices) to a quality score in [0, 10]. Implementations are deterministic.
class ScoreOracle {
 public:
  virtual ~ScoreOracle() = default;
  virtual double score(std::span<const Index> subset) const = 0;
};

// Scores from a table. The empty subset is the no-context baseline (0 unless
// the table has an entry for it). In independence mode a subset without its
// own entry scores baseline + sum of its members' singleton gains, clamped to
// [0, 10]; otherwise a missing entry is an error.
class TableScoreOracle final : public ScoreOracle {
 public:
  TableScoreOracle(std::map<std::vector<Index>, double> entries, DocumentIds ids,
                   bool independence);

  static TableScoreOracle from_csv(std::istream& in, DocumentIds ids,
                                   bool independence);
  void write_csv(std::ostream& out) const;

  double score(std::span<const Index> subset) const override;
  double baseline() const;
  bool independence() const { return independence_; }
  const std::map<std::vector<Index>, double>& entries() const { return entries_; }
  const DocumentIds& ids() const { return ids_; }

 private:
  std::map<std::vector<Index>, double> entries_;
  DocumentIds ids_;
  bool independence_;
};

// Remote judge over HTTP: POST <endpoint>/score with
// {"query": string, "documents": [string]} and a {"score": number} reply.
// Results are memoized so repeated subsets return the same score.
class RemoteScoreOracle final : public ScoreOracle {
 public:
  struct Options {
    std::chrono::seconds timeout{30};
    int retries = 2;
  };

  RemoteScoreOracle(std::string endpoint, std::string query,
                    std::vector<std::string> documents);
  RemoteScoreOracle(std::string endpoint, std::string query,
                    std::vector<std::string> documents, Options options);
  // Endpoint from $JUDGE_ENDPOINT; throws InvalidArgument when unset.
  static std::unique_ptr<RemoteScoreOracle> from_environment(
      std::string query, std::vector<std::string> documents);

  double score(std::span<const Index> subset) const override;
  const std::string& endpoint() const { return endpoint_; }
  const std::string& query() const { return query_; }
  const std::vector<std::string>& documents() const { return documents_; }

 private:
  double fetch(std::span<const Index> subset) const;

  std::string endpoint_;
  std::string query_;
  std::vector<std::string> documents_;
  Options options_;
  mutable std::mutex mutex_;
  mutable std::map<std::vector<Index>, double> cache_;
};

// Validated oracle query; throws InvalidArgument on scores outside [0, 10].
double score_subset(const ScoreOracle& oracle, std::span<const Index> subset);

}  // namespace datamarket
