#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "clocksim/config.hpp"
#include "clocksim/metrics.hpp"

#include "json.hpp"

namespace clocksim {

/// Outcome of one (drivers, seed) cell.
struct CellResult {
  int drivers = 0;
  std::uint64_t seed = 0;
  std::string run_id;
  Metrics metrics;
  std::vector<double> winning_prices;  // dollars, non-expired auctions in order
  std::vector<int> winning_rounds;     // display rounds, matching winning_prices
  std::vector<int> won_auction_index;
  std::filesystem::path events_path;
};

struct SweepReport {
  nlohmann::json document;         // full report (rows, pooled, theory, stats)
  std::vector<CellResult> cells;   // sorted by (drivers, seed)
};

/// Runs every (drivers, seed) cell of the experiment, writing per-cell
/// event logs and transcripts plus summary.csv, prices.csv and
/// sweep_report.json under out_dir. Cells run on up to config.workers
/// threads; all artifacts are cell-scoped so workers never contend.
SweepReport run_sweep(const ExperimentConfig& config,
                      const std::filesystem::path& out_dir);

/// Stats block over per-auction winning prices pooled by driver count:
/// a rank test across all counts plus a two-group comparison of the
/// collusive (2-4) versus competitive (5-7) counts when both are present.
nlohmann::json sweep_stats(const std::vector<CellResult>& cells);

std::string summary_csv(const std::vector<CellResult>& cells);
std::string prices_csv(const std::vector<CellResult>& cells);

}  // namespace clocksim
