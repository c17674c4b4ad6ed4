#include "clocksim/event_log.hpp"

#include "clocksim/errors.hpp"

namespace clocksim {

JsonlWriter::JsonlWriter(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  out_.open(path, std::ios::out | std::ios::trunc);
  if (!out_) throw Error("cannot open event log " + path.string());
}

void JsonlWriter::emit(const nlohmann::json& event) {
  out_ << event.dump() << '\n';
  out_.flush();
}

nlohmann::json run_header_event(const RunConfig& cfg,
                                const std::vector<std::string>& policy_kinds) {
  nlohmann::json market{
      {"customer_price", cfg.params.customer_price.dollars()},
      {"reservation_wage", cfg.params.reservation_wage.dollars()},
      {"waiting_cost", cfg.params.waiting_cost.dollars()},
      {"start_fraction", cfg.params.start_fraction},
      {"step_fraction", cfg.params.step_fraction},
      {"max_round", cfg.params.max_round},
  };
  return nlohmann::json{
      {"schema", kEventSchemaVersion}, {"type", "run_header"},
      {"run_id", cfg.run_id},          {"drivers", cfg.num_drivers},
      {"auctions", cfg.num_auctions},  {"seed", cfg.rng_seed},
      {"market", std::move(market)},   {"policies", policy_kinds},
  };
}

nlohmann::json round_event(int auction_index, const RoundRecord& round,
                           const std::vector<PolicyFault>& faults) {
  nlohmann::json event{
      {"type", "round"},
      {"auction", auction_index},
      {"round", round.round + 1},  // display numbering in logs
      {"price", round.price.dollars()},
      {"accepts", round.acceptors},
  };
  if (!faults.empty()) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& f : faults) {
      arr.push_back({{"driver", f.driver_id}, {"error", f.message}});
    }
    event["faults"] = std::move(arr);
  }
  return event;
}

nlohmann::json outcome_event(const AuctionRecord& record) {
  nlohmann::json event{
      {"type", "outcome"},
      {"auction", record.auction_index},
      {"expired", record.expired},
  };
  if (record.winner) {
    event["winner"] = *record.winner;
    event["round"] = *record.winning_round + 1;
    event["price"] = record.winning_price->dollars();
  }
  return event;
}

}  // namespace clocksim
