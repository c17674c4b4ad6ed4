#include "clocksim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "clocksim/errors.hpp"
#include "clocksim/event_log.hpp"
#include "clocksim/stats.hpp"
#include "clocksim/theory.hpp"

namespace clocksim {

namespace {

std::string format_fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

struct CellPlan {
  int drivers = 0;
  std::uint64_t seed = 0;
  std::string run_id;
};

BridgeContext make_bridge_context(const ExperimentConfig& config,
                                  const std::filesystem::path& out_dir,
                                  const CellPlan& plan) {
  BridgeContext bridge;
  bridge.rounds_per_auction = config.market.rounds_per_auction();
  bridge.expected_auctions = config.auctions_per_config;
  bridge.run_id = plan.run_id;

  const bool roster_uses_llm = [&] {
    for (const auto& spec : roster_for(config, plan.drivers)) {
      if (spec.kind == "llm") return true;
    }
    return false;
  }();
  if (!roster_uses_llm) return bridge;

  const auto transcript_path =
      out_dir / config.llm.transcript_dir / (plan.run_id + ".jsonl");
  if (config.llm.mode == "mock") {
    bridge.backend = std::make_shared<MockBackend>(
        make_policy(config.llm.mock_policy, config.market, 0, nullptr),
        "mock:" + config.llm.mock_policy.kind);
    bridge.recorder = std::make_shared<TranscriptRecorder>(transcript_path);
  } else if (config.llm.mode == "replay") {
    bridge.backend =
        std::make_shared<ReplayBackend>(TranscriptStore::load(transcript_path));
  } else {  // live
    HttpConfig http;
    http.base_url = config.llm.endpoint;
    http.path = config.llm.path;
    http.api_key_env = config.llm.api_key_env;
    http.timeout_seconds = config.llm.timeout_seconds;
    http.max_retries = config.llm.max_retries;
    http.rate_limit_per_minute = config.llm.rate_limit_per_minute;
    bridge.backend =
        std::make_shared<HttpChatBackend>(http, config.llm.model, config.llm.temperature);
    bridge.recorder = std::make_shared<TranscriptRecorder>(transcript_path);
  }
  return bridge;
}

CellResult run_cell(const ExperimentConfig& config,
                    const std::filesystem::path& out_dir, const CellPlan& plan) {
  RunConfig run;
  run.params = config.market;
  run.num_drivers = plan.drivers;
  run.num_auctions = config.auctions_per_config;
  run.rng_seed = plan.seed;
  run.run_id = plan.run_id;

  const BridgeContext bridge = make_bridge_context(config, out_dir, plan);
  std::vector<std::unique_ptr<Policy>> policies;
  int driver_id = 1;
  for (const auto& spec : roster_for(config, plan.drivers)) {
    policies.push_back(
        make_policy(spec, config.market, driver_id++,
                    spec.kind == "llm" ? &bridge : nullptr));
  }

  CellResult cell;
  cell.drivers = plan.drivers;
  cell.seed = plan.seed;
  cell.run_id = plan.run_id;
  cell.events_path = out_dir / "events" / (plan.run_id + ".jsonl");

  JsonlWriter sink(cell.events_path);
  const auto records = run_experiment(run, policies, &sink);
  cell.metrics = summarize(config.market, records, plan.drivers);
  for (const auto& record : records) {
    if (record.expired) continue;
    cell.winning_prices.push_back(record.winning_price->dollars());
    cell.winning_rounds.push_back(*record.winning_round + 1);
    cell.won_auction_index.push_back(record.auction_index);
  }
  return cell;
}

nlohmann::json cell_row(const CellResult& cell) {
  nlohmann::json row{
      {"drivers", cell.drivers},
      {"seed", cell.seed},
      {"run_id", cell.run_id},
      {"auctions", cell.metrics.auctions},
      {"expired", cell.metrics.expired},
  };
  if (cell.metrics.avg_price) {
    row["avg_price"] = *cell.metrics.avg_price;
    row["avg_rounds"] = *cell.metrics.avg_rounds;
    row["profit_share"] = *cell.metrics.profit_share;
  }
  nlohmann::json earnings = nlohmann::json::array();
  for (const Money m : cell.metrics.gross_earnings) earnings.push_back(m.dollars());
  row["gross_earnings"] = std::move(earnings);
  return row;
}

nlohmann::json pooled_rows(const ExperimentConfig& config,
                           const std::vector<CellResult>& cells) {
  nlohmann::json pooled = nlohmann::json::array();
  for (const int drivers : config.sweep_drivers) {
    std::int64_t price_cents = 0;
    std::int64_t rounds = 0;
    int won = 0;
    int expired = 0;
    int auctions = 0;
    double earnings_total = 0.0;
    for (const auto& cell : cells) {
      if (cell.drivers != drivers) continue;
      auctions += cell.metrics.auctions;
      expired += cell.metrics.expired;
      for (const double p : cell.winning_prices) {
        price_cents += std::llround(p * 100.0);
        ++won;
      }
      for (const int r : cell.winning_rounds) rounds += r;
      for (const Money m : cell.metrics.gross_earnings) earnings_total += m.dollars();
    }
    nlohmann::json row{{"drivers", drivers}, {"auctions", auctions}, {"expired", expired}};
    if (won > 0) {
      const double avg_price = static_cast<double>(price_cents) / won / 100.0;
      row["avg_price"] = avg_price;
      row["avg_rounds"] = static_cast<double>(rounds) / won;
      row["profit_share"] = (config.market.customer_price.dollars() - avg_price) /
                            config.market.customer_price.dollars();
      row["avg_driver_earnings"] =
          earnings_total / (static_cast<double>(drivers) *
                            static_cast<double>(config.seeds.size()));
    }
    row["delta_min_at_max_round"] =
        ic_delta_min(config.market, drivers, config.market.max_round);
    pooled.push_back(std::move(row));
  }
  return pooled;
}

nlohmann::json theory_overlay(const ExperimentConfig& config) {
  const auto& params = config.market;
  nlohmann::json overlay;
  const auto n_c = competitive_round(params);
  if (n_c) {
    overlay["competitive_round"] = *n_c;
    overlay["competitive_price"] = price_at_round(params, *n_c).dollars();
  }
  overlay["collusive_round"] = params.max_round;
  overlay["collusive_price"] = price_at_round(params, params.max_round).dollars();
  const auto cartel = max_cartel_size(params, params.max_round);
  if (cartel == kUnboundedCartel) {
    overlay["max_cartel"] = "unbounded";
  } else {
    overlay["max_cartel"] = cartel;
  }
  overlay["discount"] = params.discount;
  return overlay;
}

}  // namespace

nlohmann::json sweep_stats(const std::vector<CellResult>& cells) {
  std::map<int, std::vector<double>> by_drivers;
  for (const auto& cell : cells) {
    auto& bucket = by_drivers[cell.drivers];
    bucket.insert(bucket.end(), cell.winning_prices.begin(), cell.winning_prices.end());
  }

  nlohmann::json stats = nlohmann::json::object();
  std::vector<SampleGroup> groups;
  for (const auto& [drivers, prices] : by_drivers) {
    if (!prices.empty()) {
      groups.push_back({"N=" + std::to_string(drivers), prices});
    }
  }
  if (groups.size() >= 2) stats["kruskal_wallis"] = kruskal_wallis(groups);

  SampleGroup collusive{"N=2-4", {}};
  SampleGroup competitive{"N=5-7", {}};
  for (const auto& [drivers, prices] : by_drivers) {
    if (drivers >= 2 && drivers <= 4) {
      collusive.values.insert(collusive.values.end(), prices.begin(), prices.end());
    } else if (drivers >= 5 && drivers <= 7) {
      competitive.values.insert(competitive.values.end(), prices.begin(), prices.end());
    }
  }
  if (!collusive.values.empty() && !competitive.values.empty()) {
    stats["mann_whitney"] = mann_whitney_u(collusive, competitive);
  }
  return stats;
}

std::string summary_csv(const std::vector<CellResult>& cells) {
  std::string csv = "N,T,seed,avg_price,avg_rounds,profit_share,expiry_count\n";
  for (const auto& cell : cells) {
    csv += std::to_string(cell.drivers) + ',' + std::to_string(cell.metrics.auctions) +
           ',' + std::to_string(cell.seed) + ',';
    if (cell.metrics.avg_price) {
      csv += format_fixed(*cell.metrics.avg_price, 4) + ',' +
             format_fixed(*cell.metrics.avg_rounds, 4) + ',' +
             format_fixed(*cell.metrics.profit_share, 6);
    } else {
      csv += ",,";  // absent, not zero: every auction expired
    }
    csv += ',' + std::to_string(cell.metrics.expired) + '\n';
  }
  return csv;
}

std::string prices_csv(const std::vector<CellResult>& cells) {
  std::string csv = "N,seed,auction,price,round\n";
  for (const auto& cell : cells) {
    for (std::size_t i = 0; i < cell.winning_prices.size(); ++i) {
      csv += std::to_string(cell.drivers) + ',' + std::to_string(cell.seed) + ',' +
             std::to_string(cell.won_auction_index[i]) + ',' +
             format_fixed(cell.winning_prices[i], 2) + ',' +
             std::to_string(cell.winning_rounds[i]) + '\n';
    }
  }
  return csv;
}

SweepReport run_sweep(const ExperimentConfig& config,
                      const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  std::vector<CellPlan> plans;
  for (const int drivers : config.sweep_drivers) {
    for (const std::uint64_t seed : config.seeds) {
      plans.push_back(
          {drivers, seed, "N" + std::to_string(drivers) + "_seed" + std::to_string(seed)});
    }
  }

  std::vector<CellResult> cells(plans.size());
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::string failure;
  bool failure_is_bridge = false;

  std::mutex progress_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= plans.size()) return;
      try {
        cells[i] = run_cell(config, out_dir, plans[i]);
        const std::lock_guard<std::mutex> lock(progress_mutex);
        std::fprintf(stderr, "[%zu/%zu] %s done\n", i + 1, plans.size(),
                     plans[i].run_id.c_str());
      } catch (const std::exception& e) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (failure.empty()) {
          failure = "cell " + plans[i].run_id + ": " + e.what();
          failure_is_bridge =
              dynamic_cast<const BridgeUnavailable*>(&e) != nullptr;
        }
        return;
      }
    }
  };

  const std::size_t thread_count =
      std::min<std::size_t>(static_cast<std::size_t>(config.workers), plans.size());
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < thread_count; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (!failure.empty()) {
    if (failure_is_bridge) throw BridgeUnavailable(failure);
    throw Error(failure);
  }

  std::sort(cells.begin(), cells.end(), [](const CellResult& a, const CellResult& b) {
    return std::tie(a.drivers, a.seed) < std::tie(b.drivers, b.seed);
  });

  SweepReport report;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& cell : cells) rows.push_back(cell_row(cell));
  report.document = nlohmann::json{
      {"schema", 1},
      {"rows", std::move(rows)},
      {"pooled", pooled_rows(config, cells)},
      {"theory", theory_overlay(config)},
      {"stats", sweep_stats(cells)},
      {"market",
       {{"customer_price", config.market.customer_price.dollars()},
        {"reservation_wage", config.market.reservation_wage.dollars()},
        {"waiting_cost", config.market.waiting_cost.dollars()}}},
  };
  report.cells = std::move(cells);

  std::ofstream(out_dir / "summary.csv") << summary_csv(report.cells);
  std::ofstream(out_dir / "prices.csv") << prices_csv(report.cells);
  std::ofstream(out_dir / "sweep_report.json") << report.document.dump(2) << '\n';
  return report;
}

}  // namespace clocksim
