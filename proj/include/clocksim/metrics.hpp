#pragma once

#include <optional>
#include <vector>

#include "clocksim/engine.hpp"

namespace clocksim {

/// Aggregates over one run. Price/round averages cover non-expired
/// auctions only and are absent (not zero) when every auction expired.
struct Metrics {
  int auctions = 0;
  int expired = 0;
  std::optional<double> avg_price;    // dollars
  std::optional<double> avg_rounds;   // display rounds (1-based)
  std::optional<double> profit_share; // (P_c - avg_price) / P_c
  std::vector<Money> gross_earnings;  // per driver, index 0 = driver 1
};

Metrics summarize(const MarketParams& params,
                  const std::vector<AuctionRecord>& records, int num_drivers);

}  // namespace clocksim
