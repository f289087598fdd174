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

// Command-line driver: generate markets, solve them, price sellers, sweep
// misreports and audit mechanisms.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "datamarket/audit.hpp"
#include "datamarket/market_io.hpp"
#include "datamarket/output.hpp"
#include "datamarket/payments.hpp"

namespace dm = datamarket;

namespace {

struct RunConfig {
  std::string market_path;
  std::string output_path;
  std::string format = "json";
  std::uint64_t seed = 0;
  std::string rule = "vcg";
  std::vector<std::string> rules;
  dm::Index seller = 0;
  double grid_low = 0.1;
  double grid_high = 10.0;
  int grid_points = 100;
  std::string grid_spacing = "log";
  bool grid_absolute = false;
  bool redistribute = false;
  int shapley_permutations = 0;
  bool serial = false;
  dm::GenerateOptions generate;
};

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("datamarket");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("MARKET_LOG")) {
    const std::string name(level);
    if (name == "error") {
      spdlog::set_level(spdlog::level::err);
    } else if (name == "info") {
      spdlog::set_level(spdlog::level::info);
    } else if (name == "debug") {
      spdlog::set_level(spdlog::level::debug);
    } else {
      spdlog::warn("ignoring MARKET_LOG={} (expected error, info or debug)", name);
    }
  }
}

void emit(const RunConfig& config, const std::string& body) {
  if (config.output_path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(config.output_path, std::ios::binary);
  if (!out) throw dm::InvalidArgument("cannot write " + config.output_path);
  out << body;
  spdlog::info("wrote {}", config.output_path);
}

dm::PaymentOptions payment_options(const RunConfig& config) {
  dm::PaymentOptions options;
  if (config.shapley_permutations > 0) {
    options.shapley = dm::ShapleyMode::sampled(config.shapley_permutations, config.seed);
  }
  options.execution = config.serial ? dm::Execution::kSerial : dm::Execution::kParallel;
  return options;
}

dm::GridSpec grid_spec(const RunConfig& config) {
  dm::GridSpec grid;
  grid.low = config.grid_low;
  grid.high = config.grid_high;
  grid.points = config.grid_points;
  grid.spacing = dm::parse_spacing(config.grid_spacing);
  grid.relative = !config.grid_absolute;
  grid.validate();
  return grid;
}

std::unique_ptr<dm::Market> load(const RunConfig& config) {
  if (config.market_path.empty()) throw dm::ValidationError({"--market is required"});
  auto market = dm::load_market(config.market_path);
  spdlog::info("loaded {} market: {} buyers, {} sellers", market->family(),
               market->num_buyers(), market->num_sellers());
  return market;
}

void run_gen(const RunConfig& config) {
  auto market = dm::generate_market(config.generate, config.seed);
  emit(config, dm::dump_json(dm::market_to_json(*market)));
}

void run_solve(const RunConfig& config) {
  auto market = load(config);
  const dm::Allocation w = market->solve(market->true_costs());
  const dm::WelfareReport welfare = dm::social_welfare(*market, w, market->true_costs());
  if (dm::parse_format(config.format) == dm::Format::kCsv) {
    std::ostringstream out;
    dm::write_solution_csv(out, w, welfare);
    emit(config, out.str());
  } else {
    emit(config, dm::dump_json(dm::solution_json(*market, w, welfare)));
  }
}

void run_pay(const RunConfig& config) {
  auto market = load(config);
  const dm::Rule rule = dm::parse_rule(config.rule);
  dm::PaymentResult result =
      dm::compute_payment(*market, rule, market->true_costs(), payment_options(config));
  for (std::size_t j = 0; j < result.truncated.size(); ++j) {
    if (result.truncated[j]) {
      spdlog::warn("seller {}: payment integral truncated at the upper limit", j);
    }
  }
  if (config.redistribute) dm::attach_redistribution(*market, market->true_costs(), result);
  if (dm::parse_format(config.format) == dm::Format::kCsv) {
    std::ostringstream out;
    dm::write_payment_csv(out, result);
    emit(config, out.str());
  } else {
    emit(config, dm::dump_json(dm::payment_json(result)));
  }
}

void run_sweep(const RunConfig& config) {
  auto market = load(config);
  const dm::Rule rule = dm::parse_rule(config.rule);
  if (config.seller < 0 || config.seller >= market->num_sellers()) {
    throw dm::ValidationError({"--seller must lie in [0, " +
                               std::to_string(market->num_sellers()) + ")"});
  }
  const std::vector<double> grid =
      grid_spec(config).points_for(market->true_costs()[config.seller]);
  const auto records =
      dm::misreport_sweep(*market, rule, config.seller, grid, payment_options(config));
  if (dm::parse_format(config.format) == dm::Format::kCsv) {
    std::ostringstream out;
    dm::write_sweep_csv(out, records);
    emit(config, out.str());
  } else {
    emit(config, dm::dump_json(dm::sweep_json(records)));
  }
}

void run_audit(const RunConfig& config) {
  auto market = load(config);
  std::vector<dm::Rule> rules;
  if (config.rules.empty()) {
    rules.assign(std::begin(dm::kAllRules), std::end(dm::kAllRules));
  } else {
    for (const std::string& r : config.rules) rules.push_back(dm::parse_rule(r));
  }
  const auto verdicts =
      dm::mechanism_audit(*market, rules, grid_spec(config), payment_options(config));
  if (dm::parse_format(config.format) == dm::Format::kCsv) {
    std::ostringstream out;
    dm::write_audit_csv(out, verdicts);
    emit(config, out.str());
  } else {
    emit(config, dm::dump_json(dm::audit_json(verdicts)));
  }
}

void add_common(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--output,-o", config.output_path, "Output file (default: stdout)");
  cmd->add_option("--format", config.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--serial", config.serial, "Use the serial reference kernels");
}

void add_market(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--market,-m", config.market_path, "Market configuration (JSON)")
      ->required();
}

void add_grid(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--grid-low", config.grid_low,
                  "Lowest reported cost (multiple of the true cost unless --grid-absolute)");
  cmd->add_option("--grid-high", config.grid_high, "Highest reported cost");
  cmd->add_option("--grid-points", config.grid_points, "Number of grid points (>= 2)");
  cmd->add_option("--grid-spacing", config.grid_spacing, "Grid spacing")
      ->check(CLI::IsMember({"log", "linear"}));
  cmd->add_flag("--grid-absolute", config.grid_absolute,
                "Interpret --grid-low/--grid-high as absolute costs");
}

void add_payment(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--shapley-permutations", config.shapley_permutations,
                  "Sample this many permutations for Shapley (0: exact)");
  cmd->add_option("--seed", config.seed, "Seed for sampled Shapley");
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  RunConfig config;
  CLI::App app{"Data market mechanisms: allocation, payments and incentive audits.\n"
               "Environment: MARKET_LOG=error|info|debug, JUDGE_ENDPOINT=<url> for remote "
               "score oracles."};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "Write a random market configuration");
  gen->add_option("--family", config.generate.family, "Market family")
      ->check(CLI::IsMember({"mean", "mixture", "retrieval"}));
  gen->add_option("--seed", config.seed, "Generator seed");
  gen->add_option("--buyers", config.generate.buyers, "Buyers (mean)");
  gen->add_option("--sellers", config.generate.sellers, "Sellers (mean, mixture)");
  gen->add_option("--dimension", config.generate.dimension, "Mean dimension (mean)");
  gen->add_option("--corpus", config.generate.corpus, "Corpus size (retrieval)");
  gen->add_option("--pool", config.generate.pool, "Retrieved pool size n (retrieval)");
  gen->add_option("--budget", config.generate.budget, "Context budget k (retrieval)");
  gen->add_option("--output,-o", config.output_path, "Output file (default: stdout)");

  auto* solve = app.add_subcommand("solve", "Optimal allocation and welfare at true costs");
  add_market(solve, config);
  add_common(solve, config);

  auto* pay = app.add_subcommand("pay", "Seller payments under one rule at true costs");
  add_market(pay, config);
  add_common(pay, config);
  add_payment(pay, config);
  pay->add_option("--rule,-r", config.rule, "Payment rule")
      ->check(CLI::IsMember({"direct", "loo", "shapley", "myerson", "vcg"}));
  pay->add_flag("--redistribute", config.redistribute,
                "Split payments across buyers and report buyer charges");

  auto* sweep = app.add_subcommand("sweep", "One seller's misreport sweep");
  add_market(sweep, config);
  add_common(sweep, config);
  add_payment(sweep, config);
  add_grid(sweep, config);
  sweep->add_option("--rule,-r", config.rule, "Payment rule")
      ->check(CLI::IsMember({"direct", "loo", "shapley", "myerson", "vcg"}));
  sweep->add_option("--seller,-s", config.seller, "Deviating seller (0-based)");

  auto* audit = app.add_subcommand("audit", "Incentive, IR and PoA audit per rule");
  add_market(audit, config);
  add_common(audit, config);
  add_payment(audit, config);
  add_grid(audit, config);
  audit->add_option("--rules", config.rules, "Rules to audit (default: all)")
      ->delimiter(',')
      ->check(CLI::IsMember({"direct", "loo", "shapley", "myerson", "vcg"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << nlohmann::json{{"error", {{"kind", "usage"}, {"message", e.what()}}}}.dump()
              << '\n';
    return 2;
  }

  try {
    if (gen->parsed()) run_gen(config);
    if (solve->parsed()) run_solve(config);
    if (pay->parsed()) run_pay(config);
    if (sweep->parsed()) run_sweep(config);
    if (audit->parsed()) run_audit(config);
  } catch (const dm::ValidationError& e) {
    std::cerr << dm::error_json(e).dump() << '\n';
    return 2;
  } catch (const dm::InvalidArgument& e) {
    std::cerr << dm::error_json(e).dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << dm::error_json(e).dump() << '\n';
    return 1;
  }
  return 0;
}
