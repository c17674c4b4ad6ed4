#pragma once

#include <string>

#include "clocksim/money.hpp"
#include "clocksim/observation.hpp"

namespace clocksim {

/// Driver-side constants interpolated into the chat templates.
struct PromptParams {
  int driver_id = 1;
  Money reservation_wage;
  Money waiting_cost;
  int rounds_per_auction = 10;
  int expected_auctions = 40;
};

struct PromptBundle {
  std::string system_context;
  std::string user_message;
};

/// Pure text rendering: identical inputs produce byte-identical prompts.
/// Only public auction information and the driver's own parameters ever
/// appear; other drivers' rationales are never available here.
PromptBundle render_prompt(const Observation& obs, const PromptParams& params);

std::string render_system_context(const PromptParams& params);
std::string render_user_message(const Observation& obs, const PromptParams& params);

}  // namespace clocksim
