#include "clocksim/market.hpp"

#include <cmath>
#include <string>

#include "clocksim/errors.hpp"

namespace clocksim {

void validate(const MarketParams& params) {
  if (params.customer_price <= Money{}) {
    throw InvalidParameter("customer_price must be positive");
  }
  if (params.reservation_wage < Money{}) {
    throw InvalidParameter("reservation_wage must be nonnegative");
  }
  if (params.waiting_cost < Money{}) {
    throw InvalidParameter("waiting_cost must be nonnegative");
  }
  if (!(params.discount >= 0.0 && params.discount < 1.0)) {
    throw InvalidParameter("discount must lie in [0, 1)");
  }
  if (params.max_round < 1) {
    throw InvalidParameter("max_round must be at least 1");
  }
  if (params.start_fraction < 0.0 || params.step_fraction < 0.0) {
    throw InvalidParameter("price fractions must be nonnegative");
  }
  const double final_fraction =
      params.start_fraction + params.step_fraction * params.max_round;
  if (final_fraction > 1.0 + 1e-9) {
    throw InvalidParameter("price schedule exceeds the customer price");
  }
  if (params.demand_intercept.has_value() != params.demand_slope.has_value()) {
    throw InvalidParameter("demand_intercept and demand_slope must be given together");
  }
  if (params.demand_intercept) {
    const Money implied =
        customer_optimal_price(*params.demand_intercept, *params.demand_slope);
    const double tol = 1e-9 * params.customer_price.dollars();
    if (std::abs(implied.dollars() - params.customer_price.dollars()) > tol) {
      throw InvalidParameter("customer_price inconsistent with demand parameters: a/(2b) = " +
                             implied.str());
    }
  }
}

Money customer_optimal_price(double a, double b) {
  if (!(a > 0.0)) throw InvalidParameter("demand intercept must be positive");
  if (!(b > 0.0)) throw InvalidParameter("demand slope must be positive");
  return Money::from_dollars(a / (2.0 * b));
}

MarketParams params_from_demand(double a, double b) {
  MarketParams params;
  params.customer_price = customer_optimal_price(a, b);
  params.demand_intercept = a;
  params.demand_slope = b;
  return params;
}

Money price_at_round(const MarketParams& params, int round) {
  if (round < 0 || round > params.max_round) {
    throw RoundOutOfRange("round " + std::to_string(round) + " outside 0.." +
                          std::to_string(params.max_round));
  }
  return params.start_price() + params.price_step() * round;
}

Money utility(const MarketParams& params, int round) {
  return price_at_round(params, round) - params.reservation_wage -
         params.waiting_cost * round;
}

std::optional<int> competitive_round(const MarketParams& params) {
  for (int n = 0; n <= params.max_round; ++n) {
    if (utility(params, n) >= Money{}) return n;
  }
  return std::nullopt;
}

}  // namespace clocksim
