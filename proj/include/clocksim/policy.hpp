#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "clocksim/market.hpp"
#include "clocksim/observation.hpp"

namespace clocksim {

/// A bidder strategy. One instance is owned by exactly one driver of one
/// run; instances share no state, so any coordination can only arise
/// through the public history in the observations.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual Decision decide(const Observation& obs) = 0;
  virtual std::string kind() const = 0;
};

/// Accepts at the first round whose payout covers the reservation wage and
/// accrued waiting cost.
class CompetitivePolicy : public Policy {
 public:
  Decision decide(const Observation& obs) override;
  std::string kind() const override { return "competitive"; }
};

struct GrimState {
  bool triggered = false;
  std::optional<int> trigger_auction;
};

/// Waits for the focal round n_star, accepting there (or later, off-path).
/// Any publicly observed win at a round before n_star flips the state to
/// triggered, after which the policy plays competitively for the rest of
/// the run. Expired auctions and wins at or after n_star do not trigger.
class GrimTriggerPolicy : public Policy {
 public:
  GrimTriggerPolicy(const MarketParams& params, int n_star);
  Decision decide(const Observation& obs) override;
  std::string kind() const override { return "grim"; }
  const GrimState& state() const { return state_; }
  int n_star() const { return n_star_; }

 private:
  int n_star_;
  GrimState state_;
};

/// Test-fixture strategy: accepts exactly at the scheduled internal round
/// of each auction. A nullopt entry means never accept in that auction; an
/// auction without an entry falls back to default_round (wait when absent).
class ScriptedPolicy : public Policy {
 public:
  using Schedule = std::map<int, std::optional<int>>;

  explicit ScriptedPolicy(Schedule schedule,
                          std::optional<int> default_round = std::nullopt);
  Decision decide(const Observation& obs) override;
  std::string kind() const override { return "scripted"; }

 private:
  Schedule schedule_;
  std::optional<int> default_round_;
};

class AlwaysWaitPolicy : public Policy {
 public:
  Decision decide(const Observation&) override {
    return {false, "waiting out the auction"};
  }
  std::string kind() const override { return "always_wait"; }
};

enum class ProfileKind { kAllCompetitive, kAllGrim };

/// Per-driver continuation value of a stationary symmetric profile: zero
/// for all-competitive (rents competed away), the discounted stream of the
/// expected cartel share for all-grim at n_star. Dollars.
double stationary_profile_value(ProfileKind profile, const MarketParams& params,
                                int num_drivers, int n_star, double delta);

}  // namespace clocksim
