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
#include <filesystem>
#include <memory>
#include <string>

#include <json.hpp>

#include "datamarket/market.hpp"

namespace datamarket {

// Market configuration files are JSON objects with a "family" discriminator
// ("mean", "mixture" or "retrieval") and that family's fields:
//
//   mean:      buyer_means, seller_means, seller_variances, true_costs
//   mixture:   loss_floor, loss_scale, effect_vector, true_costs,
//              optional solver {gradient_tolerance, max_iterations}
//   retrieval: corpus_size, relevance, pool_size, budget, true_costs,
//              optional document_ids, oracle
//
// plus an optional integer "seed". A retrieval oracle is one of
//   {"kind": "table", "independence": bool, "entries": {"d1+d3": 0.8, ...}}
//   {"kind": "table", "independence": bool, "score_table": "scores.csv"}
//   {"kind": "remote", "query": "...", "documents": ["...", ...]}
// where score_table is relative to the market file and the remote judge is
// reached at $JUDGE_ENDPOINT. The "" entry is the no-context baseline.
//
// Every violated field is reported in one ValidationError.
std::unique_ptr<Market> market_from_json(const nlohmann::json& config,
                                         const std::filesystem::path& base_dir = {});
std::unique_ptr<Market> load_market(const std::filesystem::path& path);

// Table oracles are written inline.
nlohmann::json market_to_json(const Market& market);
void save_market(const Market& market, const std::filesystem::path& path);

struct GenerateOptions {
  std::string family = "mean";
  Index buyers = 5;
  Index sellers = 10;
  Index dimension = 3;
  Index corpus = 10;
  Index pool = 10;
  Index budget = 2;
};

std::unique_ptr<Market> generate_market(const GenerateOptions& options, std::uint64_t seed);

// Two-space indented dump with a trailing newline.
std::string dump_json(const nlohmann::json& value);

}  // namespace datamarket
