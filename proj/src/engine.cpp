#include "clocksim/engine.hpp"

#include <algorithm>
#include <random>

#include "clocksim/errors.hpp"
#include "clocksim/event_log.hpp"
#include "clocksim/rng.hpp"

namespace clocksim {

AuctionSummary summarize_auction(const AuctionRecord& record) {
  AuctionSummary summary;
  summary.auction_index = record.auction_index;
  summary.expired = record.expired;
  if (record.winner) {
    summary.winner_id = *record.winner;
    summary.price = *record.winning_price;
    summary.round_display = *record.winning_round + 1;
  }
  return summary;
}

Observation build_observation(const RunConfig& cfg,
                              const std::vector<AuctionRecord>& history,
                              const std::vector<RoundRecord>& rounds_so_far,
                              int driver_id, int internal_round) {
  Observation obs;
  obs.auction_index = static_cast<int>(history.size()) + 1;
  obs.round_display = internal_round + 1;
  obs.current_price = price_at_round(cfg.params, internal_round);
  obs.own_reservation_wage = cfg.params.reservation_wage;
  obs.own_waiting_cost = cfg.params.waiting_cost;

  obs.current_auction_rounds.reserve(rounds_so_far.size());
  for (const auto& r : rounds_so_far) {
    obs.current_auction_rounds.push_back(
        {r.round + 1, r.price, RoundOutcome::kNoAcceptances});
  }

  obs.past_auctions.reserve(history.size());
  for (const auto& record : history) {
    obs.past_auctions.push_back(summarize_auction(record));
    if (!record.expired && *record.winner == driver_id) {
      obs.own.rides_completed += 1;
      obs.own.total_earnings += *record.winning_price;
    }
  }
  if (obs.own.rides_completed > 0) {
    const std::int64_t cents = obs.own.total_earnings.cents();
    const std::int64_t rides = obs.own.rides_completed;
    obs.own.average_payout = Money::from_cents((cents + rides / 2) / rides);
  }
  return obs;
}

AuctionRecord run_auction(const RunConfig& cfg,
                          const std::vector<AuctionRecord>& history,
                          const std::vector<Policy*>& policies,
                          EventSink* sink) {
  if (static_cast<int>(policies.size()) != cfg.num_drivers) {
    throw InvalidParameter("policy count must equal num_drivers");
  }

  AuctionRecord record;
  record.auction_index = static_cast<int>(history.size()) + 1;
  std::mt19937_64 tie_break(auction_stream_seed(cfg.rng_seed, record.auction_index));

  for (int n = 0; n <= cfg.params.max_round; ++n) {
    RoundRecord round;
    round.round = n;
    round.price = price_at_round(cfg.params, n);

    std::vector<PolicyFault> round_faults;
    for (int driver = 1; driver <= cfg.num_drivers; ++driver) {
      const Observation obs =
          build_observation(cfg, history, record.rounds, driver, n);
      Decision decision;
      try {
        decision = policies[static_cast<std::size_t>(driver - 1)]->decide(obs);
      } catch (const BridgeUnavailable&) {
        throw;  // infrastructure failure: the cell must abort, not degrade
      } catch (const std::exception& e) {
        decision = {false, "policy failure"};
        round_faults.push_back({n, driver, e.what()});
      }
      if (decision.accept) round.acceptors.push_back(driver);
    }

    if (sink) sink->emit(round_event(record.auction_index, round, round_faults));
    record.rounds.push_back(round);
    for (auto& fault : round_faults) record.faults.push_back(std::move(fault));

    if (!round.acceptors.empty()) {
      const std::size_t pick = uniform_index(tie_break, round.acceptors.size());
      record.winner = round.acceptors[pick];
      record.winning_round = n;
      record.winning_price = round.price;
      break;
    }
  }

  record.expired = !record.winner.has_value();
  const int tau = record.expired ? cfg.params.max_round + 1 : *record.winning_round;
  record.waiting_rounds.assign(static_cast<std::size_t>(cfg.num_drivers), tau);
  if (sink) sink->emit(outcome_event(record));
  return record;
}

std::vector<AuctionRecord> run_experiment(
    const RunConfig& cfg, const std::vector<std::unique_ptr<Policy>>& policies,
    EventSink* sink) {
  validate(cfg.params);
  if (cfg.num_drivers < 1) throw InvalidParameter("num_drivers must be at least 1");
  if (cfg.num_auctions < 1) throw InvalidParameter("num_auctions must be at least 1");
  if (static_cast<int>(policies.size()) != cfg.num_drivers) {
    throw InvalidParameter("policy count must equal num_drivers");
  }

  std::vector<Policy*> raw;
  raw.reserve(policies.size());
  std::vector<std::string> kinds;
  for (const auto& p : policies) {
    raw.push_back(p.get());
    kinds.push_back(p->kind());
  }
  if (sink) sink->emit(run_header_event(cfg, kinds));

  std::vector<AuctionRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.num_auctions));
  for (int auction = 0; auction < cfg.num_auctions; ++auction) {
    records.push_back(run_auction(cfg, records, raw, sink));
  }
  return records;
}

}  // namespace clocksim
