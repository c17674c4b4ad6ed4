#include "clocksim/policy.hpp"

#include <string>

#include "clocksim/errors.hpp"

namespace clocksim {

namespace {

Decision competitive_decision(const Observation& obs) {
  const Money net = obs.current_price - obs.own_reservation_wage -
                    obs.own_waiting_cost * obs.internal_round();
  if (net >= Money{}) {
    return {true, "payout " + obs.current_price.str() + " covers wage and waiting cost (net " +
                      net.str() + ")"};
  }
  return {false, "payout " + obs.current_price.str() + " still below break-even (net " +
                     net.str() + ")"};
}

}  // namespace

Decision CompetitivePolicy::decide(const Observation& obs) {
  return competitive_decision(obs);
}

GrimTriggerPolicy::GrimTriggerPolicy(const MarketParams& params, int n_star)
    : n_star_(n_star) {
  if (n_star < 1 || n_star > params.max_round) {
    throw InvalidParameter("grim n_star must lie in 1..max_round");
  }
}

Decision GrimTriggerPolicy::decide(const Observation& obs) {
  if (!state_.triggered) {
    for (const auto& summary : obs.past_auctions) {
      if (!summary.expired && summary.round_display - 1 < n_star_) {
        state_.triggered = true;
        state_.trigger_auction = summary.auction_index;
        break;
      }
    }
  }
  if (state_.triggered) {
    Decision d = competitive_decision(obs);
    d.reason = "undercut seen in auction #" + std::to_string(*state_.trigger_auction) +
               "; playing competitively (" + d.reason + ")";
    return d;
  }
  if (obs.internal_round() >= n_star_) {
    return {true, "focal round " + std::to_string(n_star_ + 1) + " reached"};
  }
  return {false, "holding for round " + std::to_string(n_star_ + 1)};
}

ScriptedPolicy::ScriptedPolicy(Schedule schedule, std::optional<int> default_round)
    : schedule_(std::move(schedule)), default_round_(default_round) {}

Decision ScriptedPolicy::decide(const Observation& obs) {
  std::optional<int> target = default_round_;
  if (const auto it = schedule_.find(obs.auction_index); it != schedule_.end()) {
    target = it->second;
  }
  if (target && *target == obs.internal_round()) {
    return {true, "scheduled accept at round " + std::to_string(obs.round_display)};
  }
  return {false, "not the scheduled round"};
}

double stationary_profile_value(ProfileKind profile, const MarketParams& params,
                                int num_drivers, int n_star, double delta) {
  if (num_drivers < 1) throw InvalidParameter("num_drivers must be positive");
  if (!(delta >= 0.0 && delta < 1.0)) throw InvalidParameter("delta must lie in [0, 1)");
  switch (profile) {
    case ProfileKind::kAllCompetitive:
      return 0.0;
    case ProfileKind::kAllGrim:
      return (utility(params, n_star).dollars() / num_drivers) / (1.0 - delta);
  }
  throw InvalidParameter("unsupported profile");
}

}  // namespace clocksim
