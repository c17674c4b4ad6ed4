#pragma once

#include <optional>

#include "clocksim/money.hpp"

namespace clocksim {

/// Economic constants of one market environment: the customer-facing price,
/// driver characteristics, and the posted payout clock. Defaults are the
/// standard calibration used throughout ($25 fare, $10 reservation wage,
/// $0.13 per-round waiting cost, payouts from 37% of the fare in 2% steps,
/// internal rounds 0..9).
struct MarketParams {
  Money customer_price = Money::from_cents(2500);   // P_c
  Money reservation_wage = Money::from_cents(1000); // w
  Money waiting_cost = Money::from_cents(13);       // c, per round
  double discount = 0.95;                           // per-auction patience, in [0,1)
  double start_fraction = 0.37;  // first payout as a fraction of customer_price
  double step_fraction = 0.02;   // per-round increment as a fraction of customer_price
  int max_round = 9;             // internal rounds run 0..max_round

  // Optional linear-demand parameters (quantity = a - b * price). When
  // present, customer_price must equal the revenue-maximizing a / (2b).
  std::optional<double> demand_intercept;
  std::optional<double> demand_slope;

  int rounds_per_auction() const { return max_round + 1; }

  /// First posted payout, quantized to the cent grid.
  Money start_price() const {
    return Money::from_dollars(start_fraction * customer_price.dollars());
  }

  /// Per-round payout increment, quantized to the cent grid. Quantizing the
  /// step once keeps the schedule exactly linear in cents.
  Money price_step() const {
    return Money::from_dollars(step_fraction * customer_price.dollars());
  }
};

/// Throws InvalidParameter when any field violates its contract.
void validate(const MarketParams& params);

/// Revenue-maximizing customer price a/(2b) for linear demand a - b*price.
Money customer_optimal_price(double a, double b);

/// Builds params from demand primitives; customer_price is derived.
MarketParams params_from_demand(double a, double b);

/// Posted payout in internal round n (0-based). Throws RoundOutOfRange.
Money price_at_round(const MarketParams& params, int round);

/// Net payoff from accepting in round n: price - wage - cost * n.
Money utility(const MarketParams& params, int round);

/// Earliest round with nonnegative utility; nullopt when no round up to
/// max_round clears the reservation wage and accrued waiting cost.
std::optional<int> competitive_round(const MarketParams& params);

}  // namespace clocksim
