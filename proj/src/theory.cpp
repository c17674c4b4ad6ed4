#include "clocksim/theory.hpp"

#include <cmath>
#include <string>

#include "clocksim/errors.hpp"

namespace clocksim {

namespace {

void require_deviation_round(const MarketParams& params, int n_star) {
  if (n_star < 1) {
    throw InvalidParameter("n_star must be at least 1 (no earlier round to deviate to)");
  }
  if (n_star > params.max_round) {
    throw RoundOutOfRange("n_star " + std::to_string(n_star) + " exceeds max_round " +
                          std::to_string(params.max_round));
  }
}

}  // namespace

double ic_delta_min(const MarketParams& params, int num_drivers, int n_star) {
  require_deviation_round(params, n_star);
  if (num_drivers < 1) throw InvalidParameter("num_drivers must be positive");

  const double cartel_payoff = utility(params, n_star).dollars();
  const double deviation_payoff = utility(params, n_star - 1).dollars();
  if (deviation_payoff <= kValueTol) return 0.0;  // undercutting never pays
  if (cartel_payoff <= kValueTol) {
    // Positive deviation payoff against a worthless cartel: unsustainable
    // at any patience level below 1.
    return std::nextafter(1.0, 0.0);
  }
  const double raw = 1.0 - (cartel_payoff / num_drivers) / deviation_payoff;
  if (raw < 0.0) return 0.0;
  if (raw >= 1.0) return std::nextafter(1.0, 0.0);
  return raw;
}

std::int64_t max_cartel_size(const MarketParams& params, int n_star) {
  require_deviation_round(params, n_star);
  const double cartel_payoff = utility(params, n_star).dollars();
  const double deviation_payoff = utility(params, n_star - 1).dollars();
  if (deviation_payoff <= kValueTol) return kUnboundedCartel;
  if (cartel_payoff <= kValueTol) return 0;
  const double bound =
      cartel_payoff / ((1.0 - params.discount) * deviation_payoff);
  if (bound >= static_cast<double>(kUnboundedCartel)) return kUnboundedCartel;
  return static_cast<std::int64_t>(std::floor(bound));
}

Money welfare_delta(const MarketParams& params, int num_drivers, int tau_comp,
                    int tau_coll) {
  if (num_drivers < 1) throw InvalidParameter("num_drivers must be positive");
  if (tau_coll < tau_comp) {
    throw InvalidParameter("collusive delay must be at least the competitive delay");
  }
  return -(params.waiting_cost * num_drivers * (tau_coll - tau_comp));
}

Money system_welfare(const MarketParams& params, int num_drivers, int tau) {
  return params.customer_price - params.reservation_wage -
         params.waiting_cost * num_drivers * tau;
}

double platform_profit_share(const MarketParams& params, Money driver_price) {
  if (driver_price < Money{} || driver_price > params.customer_price) {
    throw InvalidParameter("driver price must lie in [0, customer_price]");
  }
  return (params.customer_price - driver_price).dollars() /
         params.customer_price.dollars();
}

std::vector<DeviationCheck> deviation_checks(const MarketParams& params,
                                             int num_drivers, int n_star,
                                             double delta) {
  require_deviation_round(params, n_star);
  if (num_drivers < 1) throw InvalidParameter("num_drivers must be positive");
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw InvalidParameter("delta must lie in [0, 1)");
  }

  // Expected per-auction cartel share and its discounted stream. The comply
  // value is floored at the passive outside option.
  const double cartel_share = utility(params, n_star).dollars() / num_drivers;
  const double comply = std::max(cartel_share / (1.0 - delta), 0.0);

  std::vector<DeviationCheck> checks;
  checks.reserve(static_cast<std::size_t>(n_star) + 1);
  for (int m = 0; m < n_star; ++m) {
    // Accept now, win alone, then face the competitive reversion (value 0).
    const double deviate = utility(params, m).dollars();
    checks.push_back({m, comply, deviate, deviate > comply + kValueTol});
  }
  // At n_star the only deviation is to wait: a rival takes the ride and the
  // cartel continues undisturbed.
  const double deviate_wait = delta * comply;
  checks.push_back({n_star, comply, deviate_wait, deviate_wait > comply + kValueTol});
  return checks;
}

SpneReport verify_spne(const MarketParams& params, int num_drivers, int n_star,
                       double delta) {
  SpneReport report;
  report.collusive = deviation_checks(params, num_drivers, n_star, delta);
  report.collusive_is_spne = true;
  for (const auto& check : report.collusive) {
    if (check.profitable) report.collusive_is_spne = false;
  }

  // Competitive profile, all rounds including off-path ones past the
  // acceptance round. Where the profile waits (negative payoff) the
  // deviation is to accept at a loss; where it accepts, the deviation is
  // to wait and forfeit the expected share.
  report.competitive_is_spne = true;
  for (int m = 0; m <= params.max_round; ++m) {
    const double payoff = utility(params, m).dollars();
    DeviationCheck check;
    check.round = m;
    if (payoff < 0.0) {
      check.comply_value = 0.0;   // profile waits; rents are competed away
      check.deviate_value = payoff;
    } else {
      check.comply_value = payoff / num_drivers;
      check.deviate_value = 0.0;  // wait while the rivals accept
    }
    check.profitable = check.deviate_value > check.comply_value + kValueTol;
    if (check.profitable) report.competitive_is_spne = false;
    report.competitive.push_back(check);
  }
  return report;
}

EquilibriumReport analyze(const MarketParams& params, int num_drivers,
                          int n_star) {
  validate(params);
  if (num_drivers < 1) throw InvalidParameter("num_drivers must be positive");
  const auto n_c = competitive_round(params);
  if (!n_c) {
    throw InvalidParameter("no competitive acceptance round: every payoff is negative");
  }
  if (n_star < *n_c) {
    throw InvalidParameter("collusive round must not precede the competitive round");
  }
  if (n_star > params.max_round) {
    throw RoundOutOfRange("n_star exceeds max_round");
  }

  EquilibriumReport report;
  report.customer_price = params.customer_price;
  report.competitive_round = *n_c;
  report.competitive_price = price_at_round(params, *n_c);
  report.collusive_round = n_star;
  report.collusive_price = price_at_round(params, n_star);
  if (n_star == 0) {
    // Colluding at round 0 is just competitive play; nothing to undercut.
    report.delta_min = 0.0;
    report.max_cartel = kUnboundedCartel;
  } else {
    report.delta_min = ic_delta_min(params, num_drivers, n_star);
    report.max_cartel = max_cartel_size(params, n_star);
  }
  report.welfare_delta = welfare_delta(params, num_drivers, *n_c, n_star);
  report.platform_profit_competitive =
      params.customer_price - report.competitive_price;
  report.platform_profit_collusive =
      params.customer_price - report.collusive_price;
  return report;
}

void to_json(nlohmann::json& j, const DeviationCheck& check) {
  j = nlohmann::json{{"round", check.round},
                     {"comply_value", check.comply_value},
                     {"deviate_value", check.deviate_value},
                     {"profitable", check.profitable}};
}

void to_json(nlohmann::json& j, const EquilibriumReport& report) {
  const double fare = report.customer_price.dollars();
  j = nlohmann::json{
      {"customer_price", fare},
      {"competitive_round", report.competitive_round},
      {"competitive_price", report.competitive_price.dollars()},
      {"collusive_round", report.collusive_round},
      {"collusive_price", report.collusive_price.dollars()},
      {"delta_min", report.delta_min},
      {"welfare_delta", report.welfare_delta.dollars()},
      {"platform_profit_competitive", report.platform_profit_competitive.dollars()},
      {"platform_profit_collusive", report.platform_profit_collusive.dollars()},
      {"platform_share_competitive", report.platform_profit_competitive.dollars() / fare},
      {"platform_share_collusive", report.platform_profit_collusive.dollars() / fare},
  };
  if (report.max_cartel == kUnboundedCartel) {
    j["max_cartel"] = "unbounded";
  } else {
    j["max_cartel"] = report.max_cartel;
  }
}

}  // namespace clocksim
