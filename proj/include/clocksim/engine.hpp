#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clocksim/market.hpp"
#include "clocksim/observation.hpp"
#include "clocksim/policy.hpp"

namespace clocksim {

class EventSink;

struct RunConfig {
  MarketParams params;
  int num_drivers = 1;
  int num_auctions = 40;
  std::uint64_t rng_seed = 1;
  std::string run_id = "run";
};

struct RoundRecord {
  int round = 0;  // internal, 0-based
  Money price;
  std::vector<int> acceptors;  // 1-based driver ids, ascending
};

/// A policy exception converted to a wait decision.
struct PolicyFault {
  int round = 0;  // internal
  int driver_id = 0;
  std::string message;
};

struct AuctionRecord {
  int auction_index = 1;  // 1-based
  std::vector<RoundRecord> rounds;
  std::optional<int> winner;          // 1-based driver id
  std::optional<int> winning_round;   // internal
  std::optional<Money> winning_price;
  bool expired = false;
  std::vector<int> waiting_rounds;  // tau per driver; max_round+1 on expiry
  std::vector<PolicyFault> faults;
};

/// Public summary of a finished auction as shown in later observations.
AuctionSummary summarize_auction(const AuctionRecord& record);

/// The exact public information driver_id sees before deciding in
/// internal_round of the next auction after `history`.
Observation build_observation(const RunConfig& cfg,
                              const std::vector<AuctionRecord>& history,
                              const std::vector<RoundRecord>& rounds_so_far,
                              int driver_id, int internal_round);

/// Runs one auction after `history`. Per round, all policies decide
/// simultaneously against the same public state; a uniformly random
/// acceptor (per-auction stream derived from rng_seed and the auction
/// index) wins, otherwise the clock advances. Policy exceptions become
/// wait decisions and are recorded as faults; BridgeUnavailable aborts.
AuctionRecord run_auction(const RunConfig& cfg,
                          const std::vector<AuctionRecord>& history,
                          const std::vector<Policy*>& policies,
                          EventSink* sink = nullptr);

/// Runs cfg.num_auctions auctions in sequence, each feeding the next
/// observations. Emits a run header plus per-round and per-outcome events
/// when a sink is given.
std::vector<AuctionRecord> run_experiment(
    const RunConfig& cfg, const std::vector<std::unique_ptr<Policy>>& policies,
    EventSink* sink = nullptr);

}  // namespace clocksim
