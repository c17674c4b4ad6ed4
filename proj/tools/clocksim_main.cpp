// Command-line front end: closed-form equilibrium queries, seeded auction
// sweeps, rank tests over emitted CSVs, SVG charts, and transcript replay.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "clocksim/config.hpp"
#include "clocksim/errors.hpp"
#include "clocksim/stats.hpp"
#include "clocksim/svg_plot.hpp"
#include "clocksim/sweep.hpp"
#include "clocksim/theory.hpp"

#include "CLI11.hpp"
#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBackend = 3;
constexpr int kExitAnalysis = 4;

struct TheoryOptions {
  double customer_price = 25.0;
  double a = 0.0;
  double b = 0.0;
  double wage = 10.0;
  double cost = 0.13;
  double delta = 0.95;
  double start_fraction = 0.37;
  double step_fraction = 0.02;
  int max_round = 9;
  int drivers = 2;
  int n_star = -1;
  bool verify = false;
};

int cmd_theory(const TheoryOptions& opt) {
  clocksim::MarketParams params;
  if (opt.a > 0.0 || opt.b > 0.0) {
    params.customer_price = clocksim::customer_optimal_price(opt.a, opt.b);
    params.demand_intercept = opt.a;
    params.demand_slope = opt.b;
  } else {
    params.customer_price = clocksim::Money::from_dollars(opt.customer_price);
  }
  params.reservation_wage = clocksim::Money::from_dollars(opt.wage);
  params.waiting_cost = clocksim::Money::from_dollars(opt.cost);
  params.discount = opt.delta;
  params.start_fraction = opt.start_fraction;
  params.step_fraction = opt.step_fraction;
  params.max_round = opt.max_round;
  clocksim::validate(params);

  const int n_star = opt.n_star >= 0 ? opt.n_star : params.max_round;
  nlohmann::json out = clocksim::analyze(params, opt.drivers, n_star);
  out["drivers"] = opt.drivers;
  out["discount"] = params.discount;
  if (opt.verify) {
    const auto report =
        clocksim::verify_spne(params, opt.drivers, n_star, params.discount);
    out["verify"] = {
        {"collusive_checks", report.collusive},
        {"competitive_checks", report.competitive},
        {"collusive_is_spne", report.collusive_is_spne},
        {"competitive_is_spne", report.competitive_is_spne},
    };
  }
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

int cmd_simulate(const std::string& config_path, const std::string& out_override,
                 const std::string& mode_override) {
  clocksim::ExperimentConfig config = clocksim::load_config(config_path);
  if (!out_override.empty()) config.output_dir = out_override;
  if (!mode_override.empty()) config.llm.mode = mode_override;

  bool uses_llm = false;
  for (const int drivers : config.sweep_drivers) {
    for (const auto& spec : clocksim::roster_for(config, drivers)) {
      uses_llm |= spec.kind == "llm";
    }
  }
  if (uses_llm && config.llm.mode == "live") {
    clocksim::HttpConfig http;
    http.base_url = config.llm.endpoint;
    http.timeout_seconds = config.llm.timeout_seconds;
    if (config.llm.endpoint.empty() ||
        !clocksim::HttpChatBackend::endpoint_reachable(http)) {
      std::cerr << "error: chat endpoint '" << config.llm.endpoint
                << "' is unreachable; no auction was started\n";
      return kExitBackend;
    }
  }

  const auto report = clocksim::run_sweep(config, config.output_dir);
  std::cout << "wrote " << report.cells.size() << " run cells under "
            << config.output_dir << '\n';
  for (const auto& row : report.document["pooled"]) {
    std::ostringstream line;
    line << "N=" << row["drivers"];
    if (row.contains("avg_price")) {
      line << "  avg_price=" << row["avg_price"] << "  avg_rounds=" << row["avg_rounds"]
           << "  profit_share=" << row["profit_share"];
    } else {
      line << "  (all auctions expired)";
    }
    std::cout << line.str() << '\n';
  }
  return kExitOk;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw clocksim::ConfigError("cannot open CSV file " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

struct StatsOptions {
  std::vector<std::string> csv_paths;
  std::string group_column = "N";
  std::string value_column = "price";
  std::vector<int> collusive = {2, 3, 4};
  std::vector<int> competitive = {5, 6, 7};
  std::string output;
};

int cmd_stats(const StatsOptions& opt) {
  std::map<int, std::vector<double>> by_group;
  for (const auto& path : opt.csv_paths) {
    const auto rows = read_csv(path);
    if (rows.empty()) throw clocksim::ConfigError("empty CSV " + path);
    const auto& header = rows.front();
    const auto find_col = [&header, &path](const std::string& name) {
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
      }
      throw clocksim::InvalidParameter("column '" + name + "' not found in " + path);
    };
    const std::size_t group_col = find_col(opt.group_column);
    const std::size_t value_col = find_col(opt.value_column);
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.size() <= std::max(group_col, value_col)) continue;
      if (row[value_col].empty()) continue;
      by_group[std::stoi(row[group_col])].push_back(std::stod(row[value_col]));
    }
  }

  std::vector<clocksim::SampleGroup> groups;
  for (const auto& [g, values] : by_group) {
    groups.push_back({opt.group_column + "=" + std::to_string(g), values});
  }
  if (groups.size() < 2) {
    throw clocksim::InvalidParameter("need at least two nonempty groups to test");
  }

  nlohmann::json out;
  out["groups"] = nlohmann::json::array();
  for (const auto& g : groups) {
    out["groups"].push_back({{"label", g.label}, {"count", g.values.size()}});
  }
  out["kruskal_wallis"] = clocksim::kruskal_wallis(groups);

  clocksim::SampleGroup collusive{"collusive", {}};
  clocksim::SampleGroup competitive{"competitive", {}};
  for (const auto& [g, values] : by_group) {
    if (std::find(opt.collusive.begin(), opt.collusive.end(), g) != opt.collusive.end()) {
      collusive.values.insert(collusive.values.end(), values.begin(), values.end());
    }
    if (std::find(opt.competitive.begin(), opt.competitive.end(), g) !=
        opt.competitive.end()) {
      competitive.values.insert(competitive.values.end(), values.begin(), values.end());
    }
  }
  if (collusive.values.empty() || competitive.values.empty()) {
    throw clocksim::InvalidParameter(
        "grouping produced an empty collusive or competitive sample");
  }
  out["mann_whitney"] = clocksim::mann_whitney_u(collusive, competitive);

  const std::string text = out.dump(2) + "\n";
  if (opt.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream(opt.output) << text;
    std::cout << "wrote " << opt.output << '\n';
  }
  return kExitOk;
}

int cmd_plot(const std::string& report_path, const std::string& out_dir) {
  std::ifstream in(report_path);
  if (!in) throw clocksim::ConfigError("cannot open report " + report_path);
  const auto doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw clocksim::ConfigError("report is not valid JSON");
  const auto written = clocksim::write_sweep_charts(doc, out_dir);
  for (const auto& path : written) std::cout << "wrote " << path.string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"repeated clock-auction simulator and equilibrium toolkit"};
  app.require_subcommand(1);

  TheoryOptions theory_opt;
  auto* theory = app.add_subcommand("theory", "closed-form equilibrium report");
  theory->add_option("--pc", theory_opt.customer_price, "customer price");
  theory->add_option("--a", theory_opt.a, "demand intercept (with --b, overrides --pc)");
  theory->add_option("--b", theory_opt.b, "demand slope");
  theory->add_option("--wage,-w", theory_opt.wage, "reservation wage");
  theory->add_option("--cost,-c", theory_opt.cost, "waiting cost per round");
  theory->add_option("--delta,-d", theory_opt.delta, "discount factor in [0,1)");
  theory->add_option("--start-fraction", theory_opt.start_fraction, "first payout fraction");
  theory->add_option("--step-fraction", theory_opt.step_fraction, "per-round increment fraction");
  theory->add_option("--max-round", theory_opt.max_round, "last internal round");
  theory->add_option("--N,-N", theory_opt.drivers, "number of drivers");
  theory->add_option("--nstar", theory_opt.n_star, "cartel acceptance round (default max-round)");
  theory->add_flag("--verify", theory_opt.verify, "include per-round deviation checks");

  std::string config_path;
  std::string out_override;
  std::string mode_override;
  auto* simulate = app.add_subcommand("simulate", "run the configured auction sweep");
  simulate->add_option("--config", config_path, "experiment config JSON")->required();
  simulate->add_option("--out", out_override, "override the output directory");

  auto* replay = app.add_subcommand(
      "replay", "re-run a sweep against its recorded transcripts");
  replay->add_option("--config", config_path, "experiment config JSON")->required();
  replay->add_option("--out", out_override, "override the output directory");

  StatsOptions stats_opt;
  auto* stats = app.add_subcommand("stats", "rank tests over emitted CSV columns");
  stats->add_option("--csv", stats_opt.csv_paths, "input CSV files")->required();
  stats->add_option("--group-column", stats_opt.group_column, "grouping column");
  stats->add_option("--value-column", stats_opt.value_column, "value column");
  stats->add_option("--collusive", stats_opt.collusive, "collusive group values");
  stats->add_option("--competitive", stats_opt.competitive, "competitive group values");
  stats->add_option("--out", stats_opt.output, "write the JSON report here");

  std::string report_path;
  std::string plot_dir = "plots";
  auto* plot = app.add_subcommand("plot", "SVG charts from a sweep report");
  plot->add_option("--report", report_path, "sweep_report.json path")->required();
  plot->add_option("--out", plot_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (theory->parsed()) return cmd_theory(theory_opt);
    if (simulate->parsed()) return cmd_simulate(config_path, out_override, "");
    if (replay->parsed()) return cmd_simulate(config_path, out_override, "replay");
    if (stats->parsed()) return cmd_stats(stats_opt);
    if (plot->parsed()) return cmd_plot(report_path, plot_dir);
  } catch (const clocksim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const clocksim::BridgeUnavailable& e) {
    std::cerr << "backend error: " << e.what() << '\n';
    return kExitBackend;
  } catch (const clocksim::InvalidParameter& e) {
    std::cerr << "analysis error: " << e.what() << '\n';
    return kExitAnalysis;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitAnalysis;
  }
  return kExitOk;
}
