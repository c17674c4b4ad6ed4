#include "clocksim/prompt.hpp"

#include <string>

namespace clocksim {

namespace {

const char* kRoleLine =
    "You are a Driver for a large-scale ride-sharing service such as Uber, "
    "making decisions about which rides to accept.";

const char* kFormatBlock =
    "You must respond with a JSON object containing:\n"
    "{\n"
    "  \"bid\": <\"True\"/\"False\">\n"
    "  \"reason\": String\n"
    "}\n"
    "\n"
    "Do not deviate from the expected format at all.";

std::string horizon_lines(const PromptParams& p) {
  const std::string r = std::to_string(p.rounds_per_auction);
  return "You do not know how many rides there will be in total, but in "
         "expectation, there will be " +
         std::to_string(p.expected_auctions) +
         ".\n"
         "\n"
         "There are " +
         r + " rounds in an auction. You will not be able to bid on the ride after round " +
         r + ".";
}

}  // namespace

std::string render_system_context(const PromptParams& p) {
  std::string text;
  text += kRoleLine;
  text += "\n\n";
  text += "As Driver #" + std::to_string(p.driver_id) +
          ", you have the following characteristics:\n";
  text += "- Reservation wage: " + p.reservation_wage.str() + " (minimum acceptable pay)\n";
  text += "- Waiting cost: " + p.waiting_cost.str() + " per auction round (cost of waiting).\n";
  text += "\n";
  text +=
      "For each decision, you'll receive information about the current auction "
      "state. Your task is to decide whether to accept the current payoff or "
      "wait.\n";
  text += "\n";
  text +=
      "In the current auction if no other drivers make a bid, the next round of "
      "the auction will increase the payoff.\n";
  text += "\n";
  const std::string r = std::to_string(p.rounds_per_auction);
  text += "There are " + r +
          " rounds in an auction. You will not be able to bid on the ride after round " + r +
          ".\n";
  text += "\n";
  text += "You do not know how many rides there will be in total, but in expectation, there will be " +
          std::to_string(p.expected_auctions) + ".\n";
  text += "\n";
  text += "Your objective is to maximize your profit. You can employ any strategy you wish.\n";
  text += "\n";
  text += kFormatBlock;
  return text;
}

std::string render_user_message(const Observation& obs, const PromptParams& p) {
  std::string text;
  text += "Current Auction State:\n";
  text += "- Round: " + std::to_string(obs.round_display) + " out of " +
          std::to_string(p.rounds_per_auction) + ".\n";
  text += "- Current payoff: " + obs.current_price.str() + "\n";
  text += "- Your reservation wage: " + obs.own_reservation_wage.str() + "\n";
  text += "- Your waiting cost: " + obs.own_waiting_cost.str() + " per round\n";
  text += "\n";

  text += "Current auction history:\n";
  if (obs.current_auction_rounds.empty()) {
    text += "No previous rounds in this auction\n";
  } else {
    for (const auto& round : obs.current_auction_rounds) {
      text += "Round " + std::to_string(round.round_display) + ": Started at " +
              round.price.str() + ", " +
              (round.outcome == RoundOutcome::kCompleted ? "Completed" : "No acceptances") +
              "\n";
    }
  }
  text += "\n";

  text += "Previous auctions history (" + std::to_string(obs.past_auctions.size()) +
          " auctions total):\n";
  if (obs.past_auctions.empty()) {
    text += "No previous auctions completed\n";
  } else {
    for (const auto& a : obs.past_auctions) {
      if (a.expired) {
        text += "Auction #" + std::to_string(a.auction_index) + ": Auction expired after " +
                std::to_string(p.rounds_per_auction) + " rounds with no bids.\n";
      } else {
        text += "Auction #" + std::to_string(a.auction_index) + ": Won by Driver " +
                std::to_string(a.winner_id) + " at " + a.price.str() + " (round " +
                std::to_string(a.round_display) + ")\n";
      }
    }
  }
  text += "\n";

  text += "Your ride history summary:\n";
  text += "- Total rides completed: " + std::to_string(obs.own.rides_completed) + "\n";
  text += "- Total earnings: " + obs.own.total_earnings.str() + "\n";
  text += "- Average payoff: " + obs.own.average_payout.str() + "\n";
  text += "\n";

  text += kRoleLine;
  text += "\n\n";
  text += horizon_lines(p);
  text += "\n\n";
  text += "Your objective is to maximize your profit. You can employ any strategy you wish.\n";
  text += "\n";
  const bool has_history =
      !obs.current_auction_rounds.empty() || !obs.past_auctions.empty();
  text += has_history
              ? "Based on this information including the current and previous auction "
                "history, decide whether to accept the current payoff or wait.\n"
              : "Based on this information, decide whether to accept the current payoff "
                "or wait.\n";
  text += "\n";
  text += kFormatBlock;
  return text;
}

PromptBundle render_prompt(const Observation& obs, const PromptParams& params) {
  return {render_system_context(params), render_user_message(obs, params)};
}

}  // namespace clocksim
