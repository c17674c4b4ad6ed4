#include "clocksim/config.hpp"

#include <fstream>
#include <set>

#include "clocksim/errors.hpp"

namespace clocksim {

namespace {

void reject_unknown_keys(const nlohmann::json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
T get_or(const nlohmann::json& obj, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

MarketParams parse_market(const nlohmann::json& obj) {
  reject_unknown_keys(obj, "market",
                      {"customer_price", "reservation_wage", "waiting_cost", "discount",
                       "start_fraction", "step_fraction", "max_round",
                       "demand_intercept", "demand_slope"});
  MarketParams params;
  if (obj.contains("customer_price")) {
    params.customer_price = Money::from_dollars(obj.at("customer_price").get<double>());
  }
  if (obj.contains("reservation_wage")) {
    params.reservation_wage = Money::from_dollars(obj.at("reservation_wage").get<double>());
  }
  if (obj.contains("waiting_cost")) {
    params.waiting_cost = Money::from_dollars(obj.at("waiting_cost").get<double>());
  }
  params.discount = get_or(obj, "discount", params.discount);
  params.start_fraction = get_or(obj, "start_fraction", params.start_fraction);
  params.step_fraction = get_or(obj, "step_fraction", params.step_fraction);
  params.max_round = get_or(obj, "max_round", params.max_round);
  if (obj.contains("demand_intercept")) {
    params.demand_intercept = obj.at("demand_intercept").get<double>();
  }
  if (obj.contains("demand_slope")) {
    params.demand_slope = obj.at("demand_slope").get<double>();
  }
  if (obj.contains("demand_intercept") && !obj.contains("customer_price")) {
    if (!params.demand_slope) throw ConfigError("demand_intercept without demand_slope");
    params.customer_price =
        customer_optimal_price(*params.demand_intercept, *params.demand_slope);
  }
  try {
    validate(params);
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("market: ") + e.what());
  }
  return params;
}

PolicySpec parse_policy_spec(const nlohmann::json& obj, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  reject_unknown_keys(obj, where, {"kind", "n_star", "schedule", "default_round"});
  PolicySpec spec;
  spec.kind = get_or<std::string>(obj, "kind", "competitive");
  const std::set<std::string> kinds{"competitive", "grim", "scripted", "always_wait", "llm"};
  if (!kinds.contains(spec.kind)) {
    throw ConfigError("unknown policy kind '" + spec.kind + "' in " + where);
  }
  if (obj.contains("n_star")) spec.n_star = obj.at("n_star").get<int>();
  if (obj.contains("default_round")) spec.default_round = obj.at("default_round").get<int>();
  if (obj.contains("schedule")) {
    for (const auto& [auction, round] : obj.at("schedule").items()) {
      std::optional<int> target;
      if (round.is_number_integer()) {
        target = round.get<int>();
      } else if (!(round.is_string() && round.get<std::string>() == "never")) {
        throw ConfigError("schedule entries must be a round number or \"never\" in " + where);
      }
      int auction_index = 0;
      try {
        auction_index = std::stoi(auction);
      } catch (const std::exception&) {
        throw ConfigError("schedule keys must be auction numbers in " + where);
      }
      spec.schedule[auction_index] = target;
    }
  }
  if (spec.kind == "grim" && !spec.n_star) {
    throw ConfigError("grim policy needs n_star in " + where);
  }
  return spec;
}

std::vector<PolicySpec> parse_roster(const nlohmann::json& arr, const std::string& where) {
  if (!arr.is_array() || arr.empty()) {
    throw ConfigError(where + " must be a nonempty array of policy specs");
  }
  std::vector<PolicySpec> roster;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    roster.push_back(parse_policy_spec(arr[i], where + "[" + std::to_string(i) + "]"));
  }
  return roster;
}

LlmConfig parse_llm(const nlohmann::json& obj) {
  reject_unknown_keys(obj, "llm",
                      {"mode", "endpoint", "path", "model", "temperature", "api_key_env",
                       "transcript_dir", "mock_policy", "timeout_seconds", "max_retries",
                       "rate_limit_per_minute"});
  LlmConfig llm;
  llm.mode = get_or<std::string>(obj, "mode", llm.mode);
  if (llm.mode != "live" && llm.mode != "replay" && llm.mode != "mock") {
    throw ConfigError("llm.mode must be live, replay or mock");
  }
  llm.endpoint = get_or<std::string>(obj, "endpoint", llm.endpoint);
  llm.path = get_or<std::string>(obj, "path", llm.path);
  llm.model = get_or<std::string>(obj, "model", llm.model);
  llm.temperature = get_or(obj, "temperature", llm.temperature);
  llm.api_key_env = get_or<std::string>(obj, "api_key_env", llm.api_key_env);
  llm.transcript_dir = get_or<std::string>(obj, "transcript_dir", llm.transcript_dir);
  llm.timeout_seconds = get_or(obj, "timeout_seconds", llm.timeout_seconds);
  llm.max_retries = get_or(obj, "max_retries", llm.max_retries);
  llm.rate_limit_per_minute = get_or(obj, "rate_limit_per_minute", llm.rate_limit_per_minute);
  if (obj.contains("mock_policy")) {
    llm.mock_policy = parse_policy_spec(obj.at("mock_policy"), "llm.mock_policy");
    if (llm.mock_policy.kind == "llm") {
      throw ConfigError("llm.mock_policy cannot itself be an llm policy");
    }
  }
  return llm;
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config document must be a JSON object");
  reject_unknown_keys(doc, "config",
                      {"market", "sweep", "policies", "llm", "output_dir"});
  ExperimentConfig config;
  if (doc.contains("market")) config.market = parse_market(doc.at("market"));

  if (doc.contains("sweep")) {
    const auto& sweep = doc.at("sweep");
    reject_unknown_keys(sweep, "sweep",
                        {"drivers", "auctions_per_config", "seeds", "workers"});
    config.sweep_drivers = get_or(sweep, "drivers", config.sweep_drivers);
    config.auctions_per_config =
        get_or(sweep, "auctions_per_config", config.auctions_per_config);
    config.seeds = get_or(sweep, "seeds", config.seeds);
    config.workers = get_or(sweep, "workers", config.workers);
    if (config.sweep_drivers.empty()) throw ConfigError("sweep.drivers must be nonempty");
    for (const int n : config.sweep_drivers) {
      if (n < 1) throw ConfigError("sweep.drivers entries must be positive");
    }
    if (config.auctions_per_config < 1) {
      throw ConfigError("sweep.auctions_per_config must be positive");
    }
    if (config.seeds.empty()) throw ConfigError("sweep.seeds must be nonempty");
    if (config.workers < 1) throw ConfigError("sweep.workers must be positive");
  }

  if (doc.contains("policies")) {
    const auto& policies = doc.at("policies");
    reject_unknown_keys(policies, "policies", {"default", "overrides"});
    if (policies.contains("default")) {
      config.roster = parse_roster(policies.at("default"), "policies.default");
    }
    if (policies.contains("overrides")) {
      for (const auto& [key, roster] : policies.at("overrides").items()) {
        int drivers = 0;
        try {
          drivers = std::stoi(key);
        } catch (const std::exception&) {
          throw ConfigError("policies.overrides keys must be driver counts");
        }
        config.roster_overrides[drivers] =
            parse_roster(roster, "policies.overrides." + key);
      }
    }
  }

  if (doc.contains("llm")) config.llm = parse_llm(doc.at("llm"));
  config.output_dir = get_or<std::string>(doc, "output_dir", config.output_dir);

  // Policy parameters must fit the market's round range.
  for (const auto& [drivers, roster] : config.roster_overrides) {
    if (std::find(config.sweep_drivers.begin(), config.sweep_drivers.end(), drivers) ==
        config.sweep_drivers.end()) {
      throw ConfigError("policies.overrides for driver count " + std::to_string(drivers) +
                        " that is not in sweep.drivers");
    }
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  const auto doc = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw ConfigError("config file " + path.string() + " is not valid JSON");
  return parse_config(doc);
}

nlohmann::json to_json(const PolicySpec& spec) {
  nlohmann::json j{{"kind", spec.kind}};
  if (spec.n_star) j["n_star"] = *spec.n_star;
  if (spec.default_round) j["default_round"] = *spec.default_round;
  if (!spec.schedule.empty()) {
    nlohmann::json schedule = nlohmann::json::object();
    for (const auto& [auction, round] : spec.schedule) {
      if (round) {
        schedule[std::to_string(auction)] = *round;
      } else {
        schedule[std::to_string(auction)] = "never";
      }
    }
    j["schedule"] = std::move(schedule);
  }
  return j;
}

nlohmann::json to_json(const ExperimentConfig& config) {
  nlohmann::json market{
      {"customer_price", config.market.customer_price.dollars()},
      {"reservation_wage", config.market.reservation_wage.dollars()},
      {"waiting_cost", config.market.waiting_cost.dollars()},
      {"discount", config.market.discount},
      {"start_fraction", config.market.start_fraction},
      {"step_fraction", config.market.step_fraction},
      {"max_round", config.market.max_round},
  };
  if (config.market.demand_intercept) market["demand_intercept"] = *config.market.demand_intercept;
  if (config.market.demand_slope) market["demand_slope"] = *config.market.demand_slope;

  nlohmann::json roster = nlohmann::json::array();
  for (const auto& spec : config.roster) roster.push_back(to_json(spec));
  nlohmann::json overrides = nlohmann::json::object();
  for (const auto& [drivers, specs] : config.roster_overrides) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& spec : specs) arr.push_back(to_json(spec));
    overrides[std::to_string(drivers)] = std::move(arr);
  }
  nlohmann::json policies{{"default", std::move(roster)}};
  if (!overrides.empty()) policies["overrides"] = std::move(overrides);

  nlohmann::json llm{
      {"mode", config.llm.mode},
      {"endpoint", config.llm.endpoint},
      {"path", config.llm.path},
      {"model", config.llm.model},
      {"temperature", config.llm.temperature},
      {"api_key_env", config.llm.api_key_env},
      {"transcript_dir", config.llm.transcript_dir},
      {"mock_policy", to_json(config.llm.mock_policy)},
      {"timeout_seconds", config.llm.timeout_seconds},
      {"max_retries", config.llm.max_retries},
      {"rate_limit_per_minute", config.llm.rate_limit_per_minute},
  };

  return nlohmann::json{
      {"market", std::move(market)},
      {"sweep",
       {{"drivers", config.sweep_drivers},
        {"auctions_per_config", config.auctions_per_config},
        {"seeds", config.seeds},
        {"workers", config.workers}}},
      {"policies", std::move(policies)},
      {"llm", std::move(llm)},
      {"output_dir", config.output_dir},
  };
}

std::vector<PolicySpec> roster_for(const ExperimentConfig& config, int drivers) {
  std::vector<PolicySpec> roster = config.roster;
  if (const auto it = config.roster_overrides.find(drivers);
      it != config.roster_overrides.end()) {
    roster = it->second;
  }
  if (roster.size() == 1) {
    roster.resize(static_cast<std::size_t>(drivers), roster.front());
  }
  if (static_cast<int>(roster.size()) != drivers) {
    throw ConfigError("roster for " + std::to_string(drivers) +
                      " drivers has " + std::to_string(roster.size()) + " entries");
  }
  return roster;
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const MarketParams& params,
                                    int driver_id, const BridgeContext* bridge) {
  if (spec.kind == "competitive") return std::make_unique<CompetitivePolicy>();
  if (spec.kind == "always_wait") return std::make_unique<AlwaysWaitPolicy>();
  if (spec.kind == "grim") {
    return std::make_unique<GrimTriggerPolicy>(params, spec.n_star.value());
  }
  if (spec.kind == "scripted") {
    return std::make_unique<ScriptedPolicy>(spec.schedule, spec.default_round);
  }
  if (spec.kind == "llm") {
    if (bridge == nullptr || !bridge->backend) {
      throw ConfigError("llm policy requested without a configured chat backend");
    }
    PromptParams prompt{driver_id, params.reservation_wage, params.waiting_cost,
                        bridge->rounds_per_auction, bridge->expected_auctions};
    return std::make_unique<LlmDriverPolicy>(bridge->run_id, prompt, bridge->backend,
                                             bridge->recorder);
  }
  throw ConfigError("unknown policy kind '" + spec.kind + "'");
}

}  // namespace clocksim
