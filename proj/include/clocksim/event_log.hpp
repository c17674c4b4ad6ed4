#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "clocksim/engine.hpp"

#include "json.hpp"

namespace clocksim {

inline constexpr int kEventSchemaVersion = 1;

/// Destination for run events. Implementations must keep emission
/// strictly ordered; the engine calls from one thread per run.
class EventSink {
 public:
  virtual ~EventSink() = default;
  virtual void emit(const nlohmann::json& event) = 0;
};

/// Appends one compact JSON object per line, flushing after every event so
/// partial logs survive interruption. Key order is canonical (sorted), so
/// identical runs produce byte-identical files.
class JsonlWriter : public EventSink {
 public:
  explicit JsonlWriter(const std::filesystem::path& path);
  void emit(const nlohmann::json& event) override;

 private:
  std::ofstream out_;
};

class MemorySink : public EventSink {
 public:
  void emit(const nlohmann::json& event) override { events.push_back(event); }
  std::vector<nlohmann::json> events;
};

// Event builders. The schema is:
//   run_header: schema, type, run_id, drivers, auctions, seed, market{...}, policies[...]
//   round:      type, auction, round, price, accepts[], faults[]?
//   outcome:    type, auction, expired, winner?, round?, price?
nlohmann::json run_header_event(const RunConfig& cfg,
                                const std::vector<std::string>& policy_kinds);
nlohmann::json round_event(int auction_index, const RoundRecord& round,
                           const std::vector<PolicyFault>& faults);
nlohmann::json outcome_event(const AuctionRecord& record);

}  // namespace clocksim
