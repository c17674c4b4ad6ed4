#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "clocksim/observation.hpp"
#include "clocksim/policy.hpp"
#include "clocksim/prompt.hpp"

#include "json.hpp"

namespace clocksim {

/// Raw reply from a chat backend plus parsing bookkeeping.
struct LlmReply {
  std::string raw_text;
  double latency_ms = 0.0;
  std::optional<Decision> parsed;
  int parse_attempts = 0;
};

/// Extracts the first JSON object embedded in raw_text and reads its "bid"
/// ("True"/"False" in any case, or a JSON boolean) and "reason" keys.
/// Returns nullopt when no such object exists: parse failure is a value,
/// never an exception.
std::optional<Decision> parse_reply(const std::string& raw_text);

/// FNV-1a content hash used to detect prompt drift between record and
/// replay.
std::string prompt_hash(const PromptBundle& bundle);

struct TranscriptKey {
  std::string run_id;
  int auction_index = 0;
  int round_display = 0;
  int driver_id = 0;

  std::string str() const {
    return run_id + "/auction " + std::to_string(auction_index) + "/round " +
           std::to_string(round_display) + "/driver " + std::to_string(driver_id);
  }
  friend auto operator<=>(const TranscriptKey&, const TranscriptKey&) = default;
};

struct Transcript {
  TranscriptKey key;
  std::string model;
  double temperature = 0.0;
  std::string hash;  // of the rendered prompt
  std::string system_context;
  std::string user_message;
  std::string response;
  double latency_ms = 0.0;
  int attempt = 1;
};

/// Append-only JSONL transcript writer. Re-asks for the same key append
/// further lines; readers keep the last line per key.
class TranscriptRecorder {
 public:
  explicit TranscriptRecorder(const std::filesystem::path& path);
  void append(const Transcript& t);

 private:
  std::ofstream out_;
  std::mutex mutex_;
};

/// In-memory view of a transcript file, last line per key winning.
class TranscriptStore {
 public:
  static TranscriptStore load(const std::filesystem::path& path);

  const Transcript* find(const TranscriptKey& key) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<TranscriptKey, Transcript> entries_;
};

nlohmann::json to_json_line(const Transcript& t);
Transcript transcript_from_json(const nlohmann::json& j);

/// Transport for one chat decision. Implementations other than the HTTP
/// one exist for deterministic testing.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual LlmReply request(const PromptBundle& bundle, const TranscriptKey& key,
                           const Observation& obs) = 0;
  virtual bool live() const { return false; }
  virtual std::string model() const = 0;
  virtual double temperature() const = 0;
};

/// Synthesizes compliant JSON replies from a wrapped policy.
class MockBackend : public ChatBackend {
 public:
  explicit MockBackend(std::unique_ptr<Policy> inner, std::string model = "mock");
  LlmReply request(const PromptBundle&, const TranscriptKey&,
                   const Observation& obs) override;
  std::string model() const override { return model_; }
  double temperature() const override { return 0.0; }

 private:
  std::unique_ptr<Policy> inner_;
  std::string model_;
};

/// Returns recorded responses; any miss or prompt drift is a loud
/// BridgeUnavailable naming the key.
class ReplayBackend : public ChatBackend {
 public:
  explicit ReplayBackend(TranscriptStore store);
  LlmReply request(const PromptBundle& bundle, const TranscriptKey& key,
                   const Observation&) override;
  std::string model() const override { return "replay"; }
  double temperature() const override { return 0.0; }

 private:
  TranscriptStore store_;
};

struct HttpConfig {
  std::string base_url;  // e.g. "http://127.0.0.1:8080"
  std::string path = "/v1/chat/completions";
  std::string api_key_env = "CLOCKSIM_API_KEY";
  int timeout_seconds = 30;
  int max_retries = 3;
  int rate_limit_per_minute = 0;  // 0 = unlimited
};

/// Talks to any chat-completions-compatible JSON endpoint. Transport
/// failures are retried up to max_retries with linear backoff, then
/// surfaced as BridgeUnavailable.
class HttpChatBackend : public ChatBackend {
 public:
  HttpChatBackend(HttpConfig config, std::string model, double temperature);
  ~HttpChatBackend() override;
  LlmReply request(const PromptBundle& bundle, const TranscriptKey& key,
                   const Observation&) override;
  bool live() const override { return true; }
  std::string model() const override { return model_; }
  double temperature() const override { return temperature_; }

  /// Connectivity probe; false when the endpoint cannot be reached at all.
  static bool endpoint_reachable(const HttpConfig& config);

 private:
  struct Impl;
  HttpConfig config_;
  std::string model_;
  double temperature_;
  std::unique_ptr<Impl> impl_;
};

/// Bidder driven by a chat backend. Unparseable replies are re-asked up to
/// max_reasks times in live mode only, then degrade to a wait: waiting is
/// the passive action and cannot spuriously end an auction.
class LlmDriverPolicy : public Policy {
 public:
  LlmDriverPolicy(std::string run_id, PromptParams prompt_params,
                  std::shared_ptr<ChatBackend> backend,
                  std::shared_ptr<TranscriptRecorder> recorder = nullptr,
                  int max_reasks = 2);

  Decision decide(const Observation& obs) override;
  std::string kind() const override { return "llm"; }
  const LlmReply& last_reply() const { return last_reply_; }

 private:
  std::string run_id_;
  PromptParams prompt_params_;
  std::shared_ptr<ChatBackend> backend_;
  std::shared_ptr<TranscriptRecorder> recorder_;
  int max_reasks_;
  LlmReply last_reply_;
};

}  // namespace clocksim
