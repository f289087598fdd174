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

#include "datamarket/score_oracle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

namespace datamarket {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

void check_score_range(double score, const std::string& what) {
  if (!std::isfinite(score) || score < 0.0 || score > 10.0) {
    std::ostringstream msg;
    msg << what << " score " << score << " is outside [0, 10]";
    throw InvalidArgument(msg.str());
  }
}

}  // namespace

DocumentIds::DocumentIds(std::vector<std::string> ids) : ids_(std::move(ids)) {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    const std::string& id = ids_[i];
    if (id.empty() || id.find_first_of("+, \t\r\n") != std::string::npos) {
      throw InvalidArgument("document id '" + id +
                            "' must be non-empty without '+', ',' or whitespace");
    }
    if (!lookup_.emplace(id, static_cast<Index>(i)).second) {
      throw InvalidArgument("duplicate document id '" + id + "'");
    }
  }
}

DocumentIds DocumentIds::numbered(Index count) {
  std::vector<std::string> ids;
  for (Index i = 0; i < count; ++i) ids.push_back("d" + std::to_string(i + 1));
  return DocumentIds(std::move(ids));
}

Index DocumentIds::index_of(const std::string& id) const {
  const auto it = lookup_.find(id);
  if (it == lookup_.end()) throw InvalidArgument("unknown document id '" + id + "'");
  return it->second;
}

std::string DocumentIds::subset_key(std::span<const Index> subset) const {
  std::vector<Index> sorted(subset.begin(), subset.end());
  std::sort(sorted.begin(), sorted.end());
  std::string key;
  for (std::size_t a = 0; a < sorted.size(); ++a) {
    if (a > 0) key += '+';
    key += (*this)[sorted[a]];
  }
  return key;
}

std::vector<Index> DocumentIds::parse_subset(const std::string& key) const {
  std::vector<Index> out;
  const std::string trimmed = trim(key);
  if (trimmed.empty()) return out;
  std::stringstream in(trimmed);
  std::string part;
  while (std::getline(in, part, '+')) out.push_back(index_of(trim(part)));
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw InvalidArgument("subset '" + key + "' repeats a document");
  }
  return out;
}

TableScoreOracle::TableScoreOracle(std::map<std::vector<Index>, double> entries,
                                   DocumentIds ids, bool independence)
    : entries_(std::move(entries)), ids_(std::move(ids)), independence_(independence) {
  for (const auto& [subset, score] : entries_) {
    if (!std::is_sorted(subset.begin(), subset.end())) {
      throw InvalidArgument("score table subsets must be sorted");
    }
    for (Index d : subset) {
      if (d < 0 || d >= ids_.size()) throw InvalidArgument("score table names an unknown document");
    }
    check_score_range(score, "table entry '" + ids_.subset_key(subset) + "'");
  }
}

TableScoreOracle TableScoreOracle::from_csv(std::istream& in, DocumentIds ids,
                                            bool independence) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "subset,score") {
    throw InvalidArgument("score table must start with the header 'subset,score'");
  }
  std::map<std::vector<Index>, double> entries;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw InvalidArgument("score table line " + std::to_string(line_no) +
                            " has no ',' separator");
    }
    std::vector<Index> subset = ids.parse_subset(line.substr(0, comma));
    const std::string value = trim(line.substr(comma + 1));
    char* end = nullptr;
    const double score = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size()) {
      throw InvalidArgument("score table line " + std::to_string(line_no) +
                            ": '" + value + "' is not a number");
    }
    if (!entries.emplace(std::move(subset), score).second) {
      throw InvalidArgument("score table line " + std::to_string(line_no) +
                            " repeats a subset");
    }
  }
  return TableScoreOracle(std::move(entries), std::move(ids), independence);
}

void TableScoreOracle::write_csv(std::ostream& out) const {
  out << "subset,score\n";
  // Shorter subsets first, then by document index.
  std::vector<const std::pair<const std::vector<Index>, double>*> rows;
  for (const auto& entry : entries_) rows.push_back(&entry);
  std::stable_sort(rows.begin(), rows.end(), [](auto* a, auto* b) {
    return a->first.size() < b->first.size();
  });
  for (const auto* row : rows) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), row->second);
    out << ids_.subset_key(row->first) << ',' << std::string_view(buf, res.ptr - buf)
        << '\n';
  }
}

double TableScoreOracle::baseline() const {
  const auto it = entries_.find({});
  return it == entries_.end() ? 0.0 : it->second;
}

double TableScoreOracle::score(std::span<const Index> subset) const {
  std::vector<Index> key(subset.begin(), subset.end());
  std::sort(key.begin(), key.end());
  if (const auto it = entries_.find(key); it != entries_.end()) return it->second;
  if (key.empty()) return 0.0;
  if (!independence_) {
    throw MissingScore("no score for subset '" + ids_.subset_key(key) + "'");
  }
  const double base = baseline();
  double total = base;
  for (Index d : key) {
    const auto it = entries_.find({d});
    if (it == entries_.end()) {
      throw MissingScore("no singleton score for document '" + ids_[d] +
                         "' (needed for subset '" + ids_.subset_key(key) + "')");
    }
    total += it->second - base;
  }
  return std::clamp(total, 0.0, 10.0);
}

RemoteScoreOracle::RemoteScoreOracle(std::string endpoint, std::string query,
                                     std::vector<std::string> documents)
    : RemoteScoreOracle(std::move(endpoint), std::move(query), std::move(documents),
                        Options{}) {}

RemoteScoreOracle::RemoteScoreOracle(std::string endpoint, std::string query,
                                     std::vector<std::string> documents, Options options)
    : endpoint_(std::move(endpoint)),
      query_(std::move(query)),
      documents_(std::move(documents)),
      options_(options) {
  if (endpoint_.empty()) throw InvalidArgument("remote judge endpoint is empty");
  while (!endpoint_.empty() && endpoint_.back() == '/') endpoint_.pop_back();
  if (options_.retries < 0) throw InvalidArgument("retries must be >= 0");
}

std::unique_ptr<RemoteScoreOracle> RemoteScoreOracle::from_environment(
    std::string query, std::vector<std::string> documents) {
  const char* endpoint = std::getenv("JUDGE_ENDPOINT");
  if (endpoint == nullptr || *endpoint == '\0') {
    throw InvalidArgument("JUDGE_ENDPOINT is not set; the remote oracle needs it");
  }
  return std::make_unique<RemoteScoreOracle>(endpoint, std::move(query),
                                             std::move(documents));
}

double RemoteScoreOracle::score(std::span<const Index> subset) const {
  std::vector<Index> key(subset.begin(), subset.end());
  std::sort(key.begin(), key.end());
  std::lock_guard<std::mutex> lock(mutex_);
  if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
  const double value = fetch(key);
  cache_.emplace(std::move(key), value);
  return value;
}

double RemoteScoreOracle::fetch(std::span<const Index> subset) const {
  // Split "http://host:port/prefix" into the client base and a path prefix.
  std::string base = endpoint_;
  std::string prefix;
  const auto scheme = base.find("://");
  const auto path_start = base.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start != std::string::npos) {
    prefix = base.substr(path_start);
    base = base.substr(0, path_start);
  }
  nlohmann::json body;
  body["query"] = query_;
  body["documents"] = nlohmann::json::array();
  for (Index d : subset) {
    if (d < 0 || d >= static_cast<Index>(documents_.size())) {
      throw InvalidArgument("remote oracle asked about an unknown document");
    }
    body["documents"].push_back(documents_[static_cast<std::size_t>(d)]);
  }
  const std::string payload = body.dump();

  httplib::Client client(base);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  client.set_write_timeout(options_.timeout);

  const int attempts = 1 + options_.retries;
  std::string last_error;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    auto res = client.Post(prefix + "/score", payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw TransportError("judge at " + endpoint_ + " answered HTTP " +
                               std::to_string(res->status),
                           attempt);
    }
    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw TransportError(std::string("judge reply is not JSON: ") + e.what(), attempt);
    }
    if (!reply.contains("score") || !reply["score"].is_number()) {
      throw TransportError("judge reply has no numeric 'score'", attempt);
    }
    const double score = reply["score"].get<double>();
    check_score_range(score, "remote judge");
    return score;
  }
  throw TransportError("judge at " + endpoint_ + " unreachable after " +
                           std::to_string(attempts) + " attempts: " + last_error,
                       attempts);
}

double score_subset(const ScoreOracle& oracle, std::span<const Index> subset) {
  const double score = oracle.score(subset);
  check_score_range(score, "oracle");
  return score;
}

}  // namespace datamarket
