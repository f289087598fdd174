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

#include "datamarket/market_io.hpp"

#include <fstream>
#include <sstream>

#include "datamarket/markets.hpp"

namespace datamarket {

namespace {

using nlohmann::json;

class FieldReader {
 public:
  FieldReader(const json& object, std::vector<std::string>& violations)
      : object_(object), violations_(violations) {}

  bool has(const char* key) const { return object_.contains(key); }

  std::optional<double> number(const char* key, bool required = true) {
    if (!object_.contains(key)) {
      if (required) missing(key);
      return std::nullopt;
    }
    const json& v = object_.at(key);
    if (!v.is_number()) {
      violations_.push_back(std::string(key) + " must be a number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  std::optional<std::int64_t> integer(const char* key, bool required = true) {
    if (!object_.contains(key)) {
      if (required) missing(key);
      return std::nullopt;
    }
    const json& v = object_.at(key);
    if (!v.is_number_integer()) {
      violations_.push_back(std::string(key) + " must be an integer");
      return std::nullopt;
    }
    return v.get<std::int64_t>();
  }

  std::optional<std::vector<double>> vector(const char* key) {
    if (!object_.contains(key)) {
      missing(key);
      return std::nullopt;
    }
    return as_vector(object_.at(key), key);
  }

  std::optional<Eigen::MatrixXd> matrix(const char* key) {
    if (!object_.contains(key)) {
      missing(key);
      return std::nullopt;
    }
    const json& v = object_.at(key);
    if (!v.is_array() || v.empty()) {
      violations_.push_back(std::string(key) + " must be a non-empty array of rows");
      return std::nullopt;
    }
    std::vector<std::vector<double>> rows;
    for (const json& row : v) {
      auto r = as_vector(row, key);
      if (!r) return std::nullopt;
      rows.push_back(std::move(*r));
    }
    const std::size_t cols = rows.front().size();
    for (const auto& r : rows) {
      if (r.size() != cols) {
        violations_.push_back(std::string(key) + " rows must have equal length");
        return std::nullopt;
      }
    }
    Eigen::MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t k = 0; k < cols; ++k)
        m(static_cast<Index>(i), static_cast<Index>(k)) = rows[i][k];
    return m;
  }

  std::optional<CostVector> costs(const char* key) {
    auto v = vector(key);
    if (!v) return std::nullopt;
    try {
      return CostVector(std::move(*v));
    } catch (const Error& e) {
      violations_.push_back(std::string(key) + ": " + e.what());
      return std::nullopt;
    }
  }

 private:
  void missing(const char* key) {
    violations_.push_back("missing field " + std::string(key));
  }

  std::optional<std::vector<double>> as_vector(const json& v, const char* key) {
    if (!v.is_array()) {
      violations_.push_back(std::string(key) + " must be an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (const json& x : v) {
      if (!x.is_number()) {
        violations_.push_back(std::string(key) + " must contain only numbers");
        return std::nullopt;
      }
      out.push_back(x.get<double>());
    }
    return out;
  }

  const json& object_;
  std::vector<std::string>& violations_;
};

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(std::span<const double> v) {
  return json(std::vector<double>(v.begin(), v.end()));
}

std::shared_ptr<const ScoreOracle> read_oracle(const json& oracle_config,
                                               const DocumentIds& ids,
                                               const std::filesystem::path& base_dir,
                                               std::vector<std::string>& violations) {
  if (!oracle_config.is_object()) {
    violations.push_back("oracle must be an object");
    return nullptr;
  }
  const std::string kind = oracle_config.value("kind", "table");
  if (kind == "remote") {
    if (!oracle_config.contains("query") || !oracle_config.at("query").is_string()) {
      violations.push_back("remote oracle needs a query string");
      return nullptr;
    }
    std::vector<std::string> docs;
    if (oracle_config.contains("documents")) {
      for (const json& d : oracle_config.at("documents")) docs.push_back(d.get<std::string>());
    } else {
      docs = ids.ids();
    }
    if (static_cast<Index>(docs.size()) != ids.size()) {
      violations.push_back("remote oracle needs one document text per document");
      return nullptr;
    }
    return RemoteScoreOracle::from_environment(oracle_config.at("query").get<std::string>(),
                                               std::move(docs));
  }
  if (kind != "table") {
    violations.push_back("unknown oracle kind '" + kind + "'");
    return nullptr;
  }
  const bool independence = oracle_config.value("independence", false);
  if (oracle_config.contains("score_table")) {
    const std::filesystem::path path =
        base_dir / oracle_config.at("score_table").get<std::string>();
    std::ifstream in(path);
    if (!in) {
      violations.push_back("cannot open score table " + path.string());
      return nullptr;
    }
    return std::make_shared<TableScoreOracle>(
        TableScoreOracle::from_csv(in, ids, independence));
  }
  if (!oracle_config.contains("entries") || !oracle_config.at("entries").is_object()) {
    violations.push_back("table oracle needs entries or score_table");
    return nullptr;
  }
  std::map<std::vector<Index>, double> entries;
  for (const auto& [key, value] : oracle_config.at("entries").items()) {
    if (!value.is_number()) {
      violations.push_back("score for '" + key + "' must be a number");
      continue;
    }
    entries[ids.parse_subset(key)] = value.get<double>();
  }
  return std::make_shared<TableScoreOracle>(std::move(entries), ids, independence);
}

// Runs the market constructor's own checks even when the costs were
// rejected, so that every violation is reported together.
template <class Make>
std::unique_ptr<Market> build_checked(const json& config, std::optional<CostVector>& costs,
                                      bool fields_ok, std::vector<std::string>& violations,
                                      Make make) {
  if (violations.empty()) return make(std::move(*costs));
  if (fields_ok && !costs && config.contains("true_costs") &&
      config.at("true_costs").is_array()) {
    try {
      make(CostVector(std::vector<double>(config.at("true_costs").size(), 1.0)));
    } catch (const ValidationError& e) {
      violations.insert(violations.end(), e.violations().begin(), e.violations().end());
    } catch (const Error&) {
    }
  }
  throw ValidationError(std::move(violations));
}

}  // namespace

std::unique_ptr<Market> market_from_json(const json& config,
                                         const std::filesystem::path& base_dir) {
  if (!config.is_object()) throw ValidationError({"market config must be a JSON object"});
  std::vector<std::string> violations;
  FieldReader r(config, violations);
  const std::string family =
      config.contains("family") && config.at("family").is_string()
          ? config.at("family").get<std::string>()
          : "";
  std::optional<std::uint64_t> seed;
  if (auto s = r.integer("seed", false)) seed = static_cast<std::uint64_t>(*s);

  if (family == "mean") {
    auto buyer_means = r.matrix("buyer_means");
    auto seller_means = r.matrix("seller_means");
    auto variances = r.vector("seller_variances");
    auto costs = r.costs("true_costs");
    const bool fields_ok = buyer_means && seller_means && variances;
    return build_checked(config, costs, fields_ok, violations, [&](CostVector c) {
      return std::make_unique<MeanEstimationMarket>(
          *buyer_means, *seller_means,
          Eigen::Map<const Eigen::VectorXd>(variances->data(),
                                            static_cast<Index>(variances->size())),
          std::move(c), seed);
    });
  }
  if (family == "mixture") {
    auto floor = r.number("loss_floor");
    auto scale = r.number("loss_scale");
    auto effect = r.vector("effect_vector");
    auto costs = r.costs("true_costs");
    SolverSettings settings;
    if (config.contains("solver")) {
      const json& s = config.at("solver");
      if (!s.is_object()) {
        violations.push_back("solver must be an object");
      } else {
        FieldReader sr(s, violations);
        if (auto t = sr.number("gradient_tolerance", false)) settings.gradient_tolerance = *t;
        if (auto it = sr.integer("max_iterations", false)) {
          settings.max_iterations = static_cast<int>(*it);
        }
      }
    }
    const bool fields_ok = floor && scale && effect;
    return build_checked(config, costs, fields_ok, violations, [&](CostVector c) {
      return std::make_unique<DataMixtureMarket>(
          *floor, *scale,
          Eigen::Map<const Eigen::VectorXd>(effect->data(), static_cast<Index>(effect->size())),
          std::move(c), seed, settings);
    });
  }
  if (family == "retrieval") {
    auto relevance = r.vector("relevance");
    auto pool = r.integer("pool_size");
    auto budget = r.integer("budget");
    auto costs = r.costs("true_costs");
    auto corpus = r.integer("corpus_size", false);
    if (corpus && relevance && *corpus != static_cast<std::int64_t>(relevance->size())) {
      violations.push_back("corpus_size does not match the relevance vector");
    }
    DocumentIds ids;
    if (config.contains("document_ids")) {
      try {
        ids = DocumentIds(config.at("document_ids").get<std::vector<std::string>>());
      } catch (const std::exception& e) {
        violations.push_back(std::string("document_ids: ") + e.what());
      }
    } else if (relevance) {
      ids = DocumentIds::numbered(static_cast<Index>(relevance->size()));
    }
    std::shared_ptr<const ScoreOracle> oracle;
    if (!config.contains("oracle")) {
      violations.push_back("missing field oracle");
    } else if (violations.empty()) {
      try {
        oracle = read_oracle(config.at("oracle"), ids, base_dir, violations);
      } catch (const Error& e) {
        violations.push_back(std::string("oracle: ") + e.what());
      }
    }
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return std::make_unique<RetrievalMarket>(std::move(*relevance), *pool, *budget,
                                             std::move(*costs), std::move(oracle),
                                             std::move(ids), seed);
  }
  violations.push_back(family.empty() ? "missing field family"
                                      : "unknown family '" + family + "'");
  throw ValidationError(std::move(violations));
}

std::unique_ptr<Market> load_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open market file " + path.string());
  json config;
  try {
    config = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError({"market file " + path.string() + " is not valid JSON: " + e.what()});
  }
  return market_from_json(config, path.parent_path());
}

json market_to_json(const Market& market) {
  json out;
  out["family"] = std::string(market.family());
  if (market.seed()) out["seed"] = *market.seed();
  out["true_costs"] = vector_json(market.true_costs().values());
  if (const auto* m = dynamic_cast<const MeanEstimationMarket*>(&market)) {
    out["buyer_means"] = matrix_json(m->buyer_means());
    out["seller_means"] = matrix_json(m->seller_means());
    out["seller_variances"] =
        vector_json({m->seller_variances().data(),
                     static_cast<std::size_t>(m->seller_variances().size())});
  } else if (const auto* m = dynamic_cast<const DataMixtureMarket*>(&market)) {
    out["loss_floor"] = m->loss_floor();
    out["loss_scale"] = m->loss_scale();
    out["effect_vector"] = vector_json(
        {m->effect_vector().data(), static_cast<std::size_t>(m->effect_vector().size())});
    out["solver"] = {{"gradient_tolerance", m->settings().gradient_tolerance},
                     {"max_iterations", m->settings().max_iterations}};
  } else if (const auto* m = dynamic_cast<const RetrievalMarket*>(&market)) {
    out["corpus_size"] = m->corpus_size();
    out["relevance"] = m->relevance();
    out["pool_size"] = m->pool_size();
    out["budget"] = m->budget();
    out["document_ids"] = m->ids().ids();
    if (const auto* t = dynamic_cast<const TableScoreOracle*>(&m->oracle())) {
      json entries = json::object();
      for (const auto& [subset, score] : t->entries()) {
        entries[m->ids().subset_key(subset)] = score;
      }
      out["oracle"] = {{"kind", "table"},
                       {"independence", t->independence()},
                       {"entries", std::move(entries)}};
    } else if (const auto* remote = dynamic_cast<const RemoteScoreOracle*>(&m->oracle())) {
      out["oracle"] = {{"kind", "remote"},
                       {"query", remote->query()},
                       {"documents", remote->documents()}};
    } else {
      throw InvalidArgument("this score oracle cannot be serialized");
    }
  } else {
    throw InvalidArgument("unknown market family '" + std::string(market.family()) + "'");
  }
  return out;
}

void save_market(const Market& market, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << dump_json(market_to_json(market));
}

std::unique_ptr<Market> generate_market(const GenerateOptions& options, std::uint64_t seed) {
  if (options.family == "mean") {
    return std::make_unique<MeanEstimationMarket>(build_random_mean_market(
        options.buyers, options.sellers, options.dimension, seed));
  }
  if (options.family == "mixture") {
    return std::make_unique<DataMixtureMarket>(
        build_random_mixture_market(options.sellers, seed));
  }
  if (options.family == "retrieval") {
    return std::make_unique<RetrievalMarket>(
        build_random_retrieval_market(options.corpus, options.pool, options.budget, seed));
  }
  throw InvalidArgument("unknown family '" + options.family + "'");
}

std::string dump_json(const json& value) { return value.dump(2) + "\n"; }

}  // namespace datamarket
