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

#include "datamarket/output.hpp"

#include <charconv>
#include <cmath>

namespace datamarket {

using nlohmann::json;

namespace {

json optional_number(double value) {
  return std::isfinite(value) ? json(value) : json(nullptr);
}

json numbers(const std::vector<double>& values) {
  json out = json::array();
  for (double v : values) out.push_back(optional_number(v));
  return out;
}

json flags(const std::vector<bool>& values) {
  json out = json::array();
  for (bool v : values) out.push_back(v);
  return out;
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::kCsv;
  if (name == "json") return Format::kJson;
  throw InvalidArgument("unknown format '" + std::string(name) + "'");
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

json welfare_json(const WelfareReport& welfare) {
  return {{"per_buyer_value", numbers(welfare.per_buyer_value)},
          {"per_seller_sharing", numbers(welfare.per_seller_sharing)},
          {"per_seller_cost", numbers(welfare.per_seller_cost)},
          {"social_welfare", welfare.social_welfare},
          {"social_cost", welfare.social_cost}};
}

json solution_json(const Market& market, const Allocation& w, const WelfareReport& welfare) {
  json rows = json::array();
  for (Index i = 0; i < w.buyers(); ++i) {
    json row = json::array();
    for (Index j = 0; j < w.sellers(); ++j) row.push_back(w(i, j));
    rows.push_back(std::move(row));
  }
  return {{"family", std::string(market.family())},
          {"domain", std::string(to_string(market.domain()))},
          {"allocation", std::move(rows)},
          {"welfare", welfare_json(welfare)}};
}

json payment_json(const PaymentResult& result) {
  json out = {{"rule", std::string(to_string(result.rule))},
              {"seller_payments", numbers(result.seller_payments)},
              {"seller_utilities", numbers(result.seller_utilities)},
              {"welfare", welfare_json(result.welfare)}};
  if (result.buyer_charges) out["buyer_charges"] = numbers(*result.buyer_charges);
  if (result.buyer_utilities) out["buyer_utilities"] = numbers(*result.buyer_utilities);
  if (result.budget_gap) out["budget_gap"] = *result.budget_gap;
  if (!result.error_estimates.empty()) out["error_estimates"] = numbers(result.error_estimates);
  if (!result.truncated.empty()) out["truncated"] = flags(result.truncated);
  return out;
}

json sweep_json(const std::vector<SweepRecord>& records) {
  json out = json::array();
  for (const SweepRecord& r : records) {
    out.push_back({{"reported_cost", r.reported_cost},
                   {"payment", r.payment},
                   {"utility", r.utility},
                   {"social_cost", r.social_cost},
                   {"sharing", r.sharing},
                   {"other_sharing", r.other_sharing}});
  }
  return out;
}

json audit_json(const std::vector<AuditVerdict>& verdicts) {
  json out = json::array();
  for (const AuditVerdict& v : verdicts) {
    json item = {{"rule", std::string(to_string(v.rule))},
                 {"true_costs", numbers(v.true_costs)},
                 {"best_responses", numbers(v.best_responses)},
                 {"truthful", flags(v.truthful)},
                 {"payments", numbers(v.payments)},
                 {"seller_ir", flags(v.seller_ir)},
                 {"poa", optional_number(v.poa)},
                 {"poa_definition", "max_j SC(W*(BR_j, c_-j)) / SC(W*(c)), social cost at true costs"},
                 {"profile_sharing", numbers(v.profile_sharing)},
                 {"collapsed", v.collapsed}};
    item["seed"] = v.seed ? json(*v.seed) : json(nullptr);
    item["poa_seller"] = v.poa_seller >= 0 ? json(v.poa_seller) : json(nullptr);
    item["buyer_ir"] = flags(v.buyer_ir);
    item["budget_gap"] = v.budget_gap ? json(*v.budget_gap) : json(nullptr);
    out.push_back(std::move(item));
  }
  return out;
}

json error_json(const std::exception& error) {
  json record = {{"message", error.what()}};
  if (const auto* e = dynamic_cast<const Error*>(&error)) {
    record["kind"] = std::string(e->kind());
  } else {
    record["kind"] = "internal";
  }
  if (const auto* v = dynamic_cast<const ValidationError*>(&error)) {
    record["violations"] = v->violations();
  }
  if (const auto* t = dynamic_cast<const TransportError*>(&error)) {
    record["attempts"] = t->attempts();
  }
  if (const auto* d = dynamic_cast<const DegenerateRedistribution*>(&error)) {
    record["seller"] = d->seller();
  }
  if (const auto* c = dynamic_cast<const ConvergenceError*>(&error)) {
    record["residual"] = c->residual();
    record["iterations"] = c->iterations();
  }
  if (const auto* s = dynamic_cast<const SweepPointError*>(&error)) {
    record["reported_cost"] = s->reported_cost();
  }
  return {{"error", std::move(record)}};
}

void write_solution_csv(std::ostream& out, const Allocation& w, const WelfareReport& welfare) {
  out << "quantity,buyer,seller,value\n";
  for (Index i = 0; i < w.buyers(); ++i)
    for (Index j = 0; j < w.sellers(); ++j)
      out << "allocation," << i << ',' << j << ',' << format_double(w(i, j)) << '\n';
  for (std::size_t i = 0; i < welfare.per_buyer_value.size(); ++i)
    out << "buyer_value," << i << ",," << format_double(welfare.per_buyer_value[i]) << '\n';
  for (std::size_t j = 0; j < welfare.per_seller_sharing.size(); ++j)
    out << "sharing,," << j << ',' << format_double(welfare.per_seller_sharing[j]) << '\n';
  for (std::size_t j = 0; j < welfare.per_seller_cost.size(); ++j)
    out << "sharing_cost,," << j << ',' << format_double(welfare.per_seller_cost[j]) << '\n';
  out << "social_welfare,,," << format_double(welfare.social_welfare) << '\n';
  out << "social_cost,,," << format_double(welfare.social_cost) << '\n';
}

void write_payment_csv(std::ostream& out, const PaymentResult& result) {
  out << "party,index,payment,utility,sharing,error_estimate,truncated\n";
  for (std::size_t j = 0; j < result.seller_payments.size(); ++j) {
    out << "seller," << j << ',' << format_double(result.seller_payments[j]) << ','
        << format_double(result.seller_utilities[j]) << ','
        << format_double(result.welfare.per_seller_sharing[j]) << ',';
    if (j < result.error_estimates.size()) out << format_double(result.error_estimates[j]);
    out << ',';
    if (j < result.truncated.size()) out << (result.truncated[j] ? "true" : "false");
    out << '\n';
  }
  if (result.buyer_charges) {
    for (std::size_t i = 0; i < result.buyer_charges->size(); ++i) {
      out << "buyer," << i << ',' << format_double((*result.buyer_charges)[i]) << ','
          << format_double((*result.buyer_utilities)[i]) << ",,,\n";
    }
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << kSweepColumns << '\n';
  for (const SweepRecord& r : records) {
    out << format_double(r.reported_cost) << ',' << format_double(r.payment) << ','
        << format_double(r.utility) << ',' << format_double(r.social_cost) << ','
        << format_double(r.sharing) << ',' << format_double(r.other_sharing) << '\n';
  }
}

void write_audit_csv(std::ostream& out, const std::vector<AuditVerdict>& verdicts) {
  out << "rule,seller,true_cost,best_response,truthful,payment,seller_ir,poa,collapsed\n";
  for (const AuditVerdict& v : verdicts) {
    for (std::size_t j = 0; j < v.best_responses.size(); ++j) {
      out << to_string(v.rule) << ',' << j << ',' << format_double(v.true_costs[j]) << ','
          << format_double(v.best_responses[j]) << ',' << (v.truthful[j] ? "true" : "false")
          << ',' << format_double(v.payments[j]) << ','
          << (v.seller_ir[j] ? "true" : "false") << ',' << format_double(v.poa) << ','
          << (v.collapsed ? "true" : "false") << '\n';
    }
  }
}

}  // namespace datamarket
