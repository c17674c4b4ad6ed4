#pragma once

#include <string>
#include <vector>

#include "clocksim/money.hpp"

namespace clocksim {

/// A bidder's per-round move.
struct Decision {
  bool accept = false;
  std::string reason;
};

/// How a past round of the current auction ended from the public view.
enum class RoundOutcome { kNoAcceptances, kCompleted };

struct ObservedRound {
  int round_display = 0;  // 1-based
  Money price;
  RoundOutcome outcome = RoundOutcome::kNoAcceptances;
};

/// Public outcome of a finished auction. Winner ids are the stable
/// anonymized driver numbers used throughout a run.
struct AuctionSummary {
  int auction_index = 0;  // 1-based
  bool expired = false;
  int winner_id = 0;      // valid when !expired
  Money price;            // valid when !expired
  int round_display = 0;  // valid when !expired
};

struct OwnHistory {
  int rides_completed = 0;
  Money total_earnings;  // gross sum of own winning payouts
  Money average_payout;  // zero when no rides yet
};

/// Everything a policy may condition on at one decision point: the current
/// auction state, its own economics, and public history. Decisions of other
/// drivers in the same round are never visible.
struct Observation {
  int auction_index = 1;  // 1-based
  int round_display = 1;  // internal round + 1
  Money current_price;
  Money own_reservation_wage;
  Money own_waiting_cost;
  std::vector<ObservedRound> current_auction_rounds;
  std::vector<AuctionSummary> past_auctions;
  OwnHistory own;

  int internal_round() const { return round_display - 1; }
};

}  // namespace clocksim
