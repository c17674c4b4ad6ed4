#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "clocksim/market.hpp"
#include "clocksim/money.hpp"

#include "json.hpp"

namespace clocksim {

/// Tolerance (in dollars) for value comparisons in equilibrium checks.
inline constexpr double kValueTol = 1e-9;

/// Sentinel returned by max_cartel_size when undercutting the cartel never
/// pays (the one-shot deviation payoff is nonpositive), so the incentive
/// constraint binds for no group size.
inline constexpr std::int64_t kUnboundedCartel =
    std::numeric_limits<std::int64_t>::max();

/// Minimum patience sustaining a cartel that accepts at round n_star among
/// num_drivers symmetric drivers, clamped to [0, 1). Returns 0 when the
/// deviation payoff is nonpositive (undercutting is never tempting) and a
/// value just below 1 when the cartel share itself is nonpositive (no
/// patience level sustains it).
double ic_delta_min(const MarketParams& params, int num_drivers, int n_star);

/// Largest group size whose cartel at n_star survives the incentive
/// constraint at params.discount: floor of U(n*) / ((1-d) * U(n*-1)).
/// Returns kUnboundedCartel when the deviation payoff is nonpositive and 0
/// when the cartel share is nonpositive.
std::int64_t max_cartel_size(const MarketParams& params, int n_star);

/// Change in total welfare from delaying acceptance: -N * c * (tau_coll -
/// tau_comp), always nonpositive. Throws InvalidParameter when
/// tau_coll < tau_comp.
Money welfare_delta(const MarketParams& params, int num_drivers, int tau_comp,
                    int tau_coll);

/// Total welfare per ride at delay tau: customer_price - wage - N * c * tau.
Money system_welfare(const MarketParams& params, int num_drivers, int tau);

/// (customer_price - driver_price) / customer_price, in [0, 1].
double platform_profit_share(const MarketParams& params, Money driver_price);

/// One single-deviation comparison at a given round. comply_value is the
/// discounted value of following the profile (floored at the passive
/// outside option of zero: a driver can always sit out, so no profile is
/// worth less than nothing to comply with); deviate_value is the payoff
/// from the deviation followed by the competitive continuation (normalized
/// to zero).
struct DeviationCheck {
  int round = 0;
  double comply_value = 0.0;
  double deviate_value = 0.0;
  bool profitable = false;
};

/// Brute-force single-deviation checks for the all-grim profile accepting
/// at n_star: one accept-early check per round m < n_star and one
/// wait-instead check at m = n_star.
std::vector<DeviationCheck> deviation_checks(const MarketParams& params,
                                             int num_drivers, int n_star,
                                             double delta);

struct SpneReport {
  std::vector<DeviationCheck> collusive;
  std::vector<DeviationCheck> competitive;
  bool collusive_is_spne = false;
  bool competitive_is_spne = false;
};

/// Verifies both stationary profiles round by round via the single
/// deviation principle.
SpneReport verify_spne(const MarketParams& params, int num_drivers, int n_star,
                       double delta);

struct EquilibriumReport {
  Money customer_price;
  int competitive_round = 0;  // n_c
  Money competitive_price;
  int collusive_round = 0;  // n*
  Money collusive_price;
  double delta_min = 0.0;
  std::int64_t max_cartel = 0;  // kUnboundedCartel when IC never binds
  Money welfare_delta;
  Money platform_profit_competitive;
  Money platform_profit_collusive;
};

/// Closed-form equilibrium summary for a cartel at n_star (>= the
/// competitive round) among num_drivers drivers, using params.discount.
/// Throws InvalidParameter when no competitive acceptance round exists.
EquilibriumReport analyze(const MarketParams& params, int num_drivers,
                          int n_star);

void to_json(nlohmann::json& j, const DeviationCheck& check);
void to_json(nlohmann::json& j, const EquilibriumReport& report);

}  // namespace clocksim
