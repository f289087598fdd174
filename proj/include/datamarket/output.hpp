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

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "datamarket/audit.hpp"
#include "datamarket/market.hpp"
#include "datamarket/payments.hpp"

namespace datamarket {

enum class Format { kCsv, kJson };

Format parse_format(std::string_view name);

inline constexpr const char* kSweepColumns =
    "reported_cost,payment,utility,social_cost,sharing,other_sharing";

nlohmann::json welfare_json(const WelfareReport& welfare);
nlohmann::json solution_json(const Market& market, const Allocation& w,
                             const WelfareReport& welfare);
nlohmann::json payment_json(const PaymentResult& result);
nlohmann::json sweep_json(const std::vector<SweepRecord>& records);
nlohmann::json audit_json(const std::vector<AuditVerdict>& verdicts);
nlohmann::json error_json(const std::exception& error);

// Long format: quantity,buyer,seller,value.
void write_solution_csv(std::ostream& out, const Allocation& w, const WelfareReport& welfare);
// party,index,payment,utility,sharing,error_estimate,truncated. Buyer rows
// carry the charge in the payment column.
void write_payment_csv(std::ostream& out, const PaymentResult& result);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);
// One row per (rule, seller).
void write_audit_csv(std::ostream& out, const std::vector<AuditVerdict>& verdicts);

// Shortest representation that parses back to the same double.
std::string format_double(double value);

}  // namespace datamarket
