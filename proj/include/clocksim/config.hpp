#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "clocksim/bridge.hpp"
#include "clocksim/market.hpp"
#include "clocksim/policy.hpp"

#include "json.hpp"

namespace clocksim {

/// One roster entry. kind selects the strategy; the remaining fields apply
/// to specific kinds only (n_star for grim, schedule/default_round for
/// scripted).
struct PolicySpec {
  std::string kind = "competitive";
  std::optional<int> n_star;
  ScriptedPolicy::Schedule schedule;
  std::optional<int> default_round;
};

struct LlmConfig {
  std::string mode = "mock";  // "live", "replay" or "mock"
  std::string endpoint;       // base URL, live mode
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-4o-mini";
  double temperature = 0.2;
  std::string api_key_env = "CLOCKSIM_API_KEY";
  std::string transcript_dir = "transcripts";  // relative to the output dir
  PolicySpec mock_policy;                      // strategy behind mock replies
  int timeout_seconds = 30;
  int max_retries = 3;
  int rate_limit_per_minute = 0;
};

/// Whole-experiment description. Default values reproduce the standard
/// calibration: $25 fare, $10 wage, $0.13 waiting cost, 40 auctions each
/// for 1..7 drivers.
struct ExperimentConfig {
  MarketParams market;
  std::vector<int> sweep_drivers = {1, 2, 3, 4, 5, 6, 7};
  int auctions_per_config = 40;
  std::vector<std::uint64_t> seeds = {1};
  int workers = 1;
  std::vector<PolicySpec> roster = {PolicySpec{}};
  std::map<int, std::vector<PolicySpec>> roster_overrides;  // keyed by driver count
  LlmConfig llm;
  std::string output_dir = "out";
};

/// Parses a config document, rejecting unknown keys at every level.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const PolicySpec& spec);

/// Roster for a cell with `drivers` drivers: an override for that count
/// wins, otherwise the default roster; a single entry replicates to all
/// drivers, otherwise the entry count must equal the driver count.
std::vector<PolicySpec> roster_for(const ExperimentConfig& config, int drivers);

/// Shared chat plumbing for one run cell.
struct BridgeContext {
  std::shared_ptr<ChatBackend> backend;
  std::shared_ptr<TranscriptRecorder> recorder;  // null in replay mode
  int rounds_per_auction = 10;
  int expected_auctions = 40;
  std::string run_id;
};

/// Instantiates one policy. LLM entries need a bridge context.
std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const MarketParams& params,
                                    int driver_id, const BridgeContext* bridge);

}  // namespace clocksim
