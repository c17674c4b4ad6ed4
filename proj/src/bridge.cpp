#include "clocksim/bridge.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <thread>

#include "clocksim/errors.hpp"

#include "httplib.h"

namespace clocksim {

namespace {

std::optional<bool> read_bid(const nlohmann::json& value) {
  if (value.is_boolean()) return value.get<bool>();
  if (value.is_string()) {
    std::string s = value.get<std::string>();
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "true") return true;
    if (s == "false") return false;
  }
  return std::nullopt;
}

std::optional<Decision> decision_from_object(const nlohmann::json& obj) {
  if (!obj.is_object() || !obj.contains("bid") || !obj.contains("reason")) {
    return std::nullopt;
  }
  const auto bid = read_bid(obj["bid"]);
  if (!bid) return std::nullopt;
  Decision d;
  d.accept = *bid;
  d.reason = obj["reason"].is_string() ? obj["reason"].get<std::string>()
                                       : obj["reason"].dump();
  return d;
}

// Span of the balanced JSON object starting at `start` (which must index a
// '{'), honoring string literals and escapes. npos when unbalanced.
std::size_t object_end(const std::string& text, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i;
    }
  }
  return std::string::npos;
}

}  // namespace

std::optional<Decision> parse_reply(const std::string& raw_text) {
  // An unbalanced outer brace may still contain a balanced object, so keep
  // scanning from the next '{' either way.
  std::size_t pos = raw_text.find('{');
  while (pos != std::string::npos) {
    const std::size_t end = object_end(raw_text, pos);
    if (end != std::string::npos) {
      const auto candidate = nlohmann::json::parse(
          raw_text.substr(pos, end - pos + 1), nullptr, /*allow_exceptions=*/false);
      if (!candidate.is_discarded()) {
        if (auto decision = decision_from_object(candidate)) return decision;
      }
    }
    pos = raw_text.find('{', pos + 1);
  }
  return std::nullopt;
}

std::string prompt_hash(const PromptBundle& bundle) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](const std::string& s) {
    for (const unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    h ^= 0x1f;  // field separator
    h *= 0x100000001b3ull;
  };
  mix(bundle.system_context);
  mix(bundle.user_message);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

TranscriptRecorder::TranscriptRecorder(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::out | std::ios::app);
  if (!out_) throw Error("cannot open transcript file " + path.string());
}

void TranscriptRecorder::append(const Transcript& t) {
  const std::lock_guard<std::mutex> lock(mutex_);
  out_ << to_json_line(t).dump() << '\n';
  out_.flush();
}

TranscriptStore TranscriptStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw BridgeUnavailable("cannot open transcript file " + path.string());
  TranscriptStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      throw BridgeUnavailable("malformed transcript line " + std::to_string(line_no) +
                              " in " + path.string());
    }
    Transcript t = transcript_from_json(j);
    store.entries_[t.key] = std::move(t);  // later lines supersede earlier attempts
  }
  return store;
}

const Transcript* TranscriptStore::find(const TranscriptKey& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

nlohmann::json to_json_line(const Transcript& t) {
  return nlohmann::json{
      {"key",
       {{"run_id", t.key.run_id},
        {"auction", t.key.auction_index},
        {"round", t.key.round_display},
        {"driver", t.key.driver_id}}},
      {"model", t.model},
      {"temperature", t.temperature},
      {"prompt_hash", t.hash},
      {"system", t.system_context},
      {"user", t.user_message},
      {"response", t.response},
      {"latency_ms", t.latency_ms},
      {"attempt", t.attempt},
  };
}

Transcript transcript_from_json(const nlohmann::json& j) {
  Transcript t;
  const auto& key = j.at("key");
  t.key.run_id = key.at("run_id").get<std::string>();
  t.key.auction_index = key.at("auction").get<int>();
  t.key.round_display = key.at("round").get<int>();
  t.key.driver_id = key.at("driver").get<int>();
  t.model = j.at("model").get<std::string>();
  t.temperature = j.at("temperature").get<double>();
  t.hash = j.at("prompt_hash").get<std::string>();
  t.system_context = j.at("system").get<std::string>();
  t.user_message = j.at("user").get<std::string>();
  t.response = j.at("response").get<std::string>();
  t.latency_ms = j.value("latency_ms", 0.0);
  t.attempt = j.value("attempt", 1);
  return t;
}

MockBackend::MockBackend(std::unique_ptr<Policy> inner, std::string model)
    : inner_(std::move(inner)), model_(std::move(model)) {}

LlmReply MockBackend::request(const PromptBundle&, const TranscriptKey&,
                              const Observation& obs) {
  const Decision decision = inner_->decide(obs);
  LlmReply reply;
  reply.raw_text = nlohmann::json{{"bid", decision.accept ? "True" : "False"},
                                  {"reason", decision.reason}}
                       .dump();
  return reply;
}

ReplayBackend::ReplayBackend(TranscriptStore store) : store_(std::move(store)) {}

LlmReply ReplayBackend::request(const PromptBundle& bundle, const TranscriptKey& key,
                                const Observation&) {
  const Transcript* t = store_.find(key);
  if (!t) throw BridgeUnavailable("replay miss for " + key.str());
  if (t->hash != prompt_hash(bundle)) {
    throw BridgeUnavailable("prompt drift for " + key.str() +
                            ": rendered prompt differs from the recorded one");
  }
  LlmReply reply;
  reply.raw_text = t->response;
  return reply;
}

// ---------------------------------------------------------------------------
// HTTP backend

struct HttpChatBackend::Impl {
  httplib::Client client;
  std::chrono::steady_clock::time_point last_request{};
  std::chrono::milliseconds min_gap{0};
  std::mutex mutex;

  explicit Impl(const HttpConfig& config) : client(config.base_url) {
    client.set_connection_timeout(config.timeout_seconds, 0);
    client.set_read_timeout(config.timeout_seconds, 0);
    if (config.rate_limit_per_minute > 0) {
      min_gap = std::chrono::milliseconds(60000 / config.rate_limit_per_minute);
    }
    if (const char* key = std::getenv(config.api_key_env.c_str());
        key != nullptr && *key != '\0') {
      client.set_default_headers({{"Authorization", std::string("Bearer ") + key}});
    }
  }

  void throttle() {
    if (min_gap.count() == 0) return;
    const std::lock_guard<std::mutex> lock(mutex);
    const auto now = std::chrono::steady_clock::now();
    const auto due = last_request + min_gap;
    if (now < due) std::this_thread::sleep_for(due - now);
    last_request = std::chrono::steady_clock::now();
  }
};

HttpChatBackend::HttpChatBackend(HttpConfig config, std::string model,
                                 double temperature)
    : config_(std::move(config)),
      model_(std::move(model)),
      temperature_(temperature),
      impl_(std::make_unique<Impl>(config_)) {}

HttpChatBackend::~HttpChatBackend() = default;

bool HttpChatBackend::endpoint_reachable(const HttpConfig& config) {
  httplib::Client probe(config.base_url);
  probe.set_connection_timeout(std::min(config.timeout_seconds, 5), 0);
  probe.set_read_timeout(std::min(config.timeout_seconds, 5), 0);
  // Any HTTP response, even an error status, proves the endpoint is up.
  return probe.Get("/") != nullptr;
}

LlmReply HttpChatBackend::request(const PromptBundle& bundle, const TranscriptKey& key,
                                  const Observation&) {
  const nlohmann::json payload{
      {"model", model_},
      {"temperature", temperature_},
      {"messages",
       {{{"role", "system"}, {"content", bundle.system_context}},
        {{"role", "user"}, {"content", bundle.user_message}}}},
  };
  const std::string body = payload.dump();

  std::string last_error = "no attempt made";
  for (int attempt = 1; attempt <= std::max(config_.max_retries, 1); ++attempt) {
    impl_->throttle();
    const auto started = std::chrono::steady_clock::now();
    const auto res = impl_->client.Post(config_.path, body, "application/json");
    const auto elapsed = std::chrono::duration<double, std::milli>(
        std::chrono::steady_clock::now() - started);
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else if (res->status >= 500) {
      last_error = "server status " + std::to_string(res->status);
    } else if (res->status != 200) {
      throw BridgeUnavailable("chat endpoint returned status " +
                              std::to_string(res->status) + " for " + key.str());
    } else {
      const auto j = nlohmann::json::parse(res->body, nullptr, false);
      if (j.is_discarded() || !j.contains("choices") || j["choices"].empty()) {
        throw BridgeUnavailable("malformed chat response for " + key.str());
      }
      LlmReply reply;
      reply.raw_text =
          j["choices"][0].at("message").at("content").get<std::string>();
      reply.latency_ms = elapsed.count();
      return reply;
    }
    if (attempt < config_.max_retries) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100 * attempt));
    }
  }
  throw BridgeUnavailable("chat endpoint unreachable for " + key.str() + " (" +
                          last_error + ")");
}

// ---------------------------------------------------------------------------

LlmDriverPolicy::LlmDriverPolicy(std::string run_id, PromptParams prompt_params,
                                 std::shared_ptr<ChatBackend> backend,
                                 std::shared_ptr<TranscriptRecorder> recorder,
                                 int max_reasks)
    : run_id_(std::move(run_id)),
      prompt_params_(prompt_params),
      backend_(std::move(backend)),
      recorder_(std::move(recorder)),
      max_reasks_(max_reasks) {}

Decision LlmDriverPolicy::decide(const Observation& obs) {
  const PromptBundle bundle = render_prompt(obs, prompt_params_);
  const TranscriptKey key{run_id_, obs.auction_index, obs.round_display,
                          prompt_params_.driver_id};

  const int attempts_allowed = backend_->live() ? 1 + max_reasks_ : 1;
  last_reply_ = LlmReply{};
  for (int attempt = 1; attempt <= attempts_allowed; ++attempt) {
    LlmReply reply = backend_->request(bundle, key, obs);
    reply.parse_attempts = attempt;
    if (recorder_) {
      recorder_->append({key, backend_->model(), backend_->temperature(),
                         prompt_hash(bundle), bundle.system_context,
                         bundle.user_message, reply.raw_text, reply.latency_ms,
                         attempt});
    }
    reply.parsed = parse_reply(reply.raw_text);
    last_reply_ = reply;
    if (reply.parsed) return *reply.parsed;
  }
  return {false, "reply did not match the expected format; waiting"};
}

}  // namespace clocksim
