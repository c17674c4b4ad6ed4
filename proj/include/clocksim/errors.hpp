#pragma once

#include <stdexcept>
#include <string>

namespace clocksim {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A market parameter or operation argument violates its contract.
struct InvalidParameter : Error {
  explicit InvalidParameter(const std::string& what) : Error(what) {}
};

struct RoundOutOfRange : Error {
  explicit RoundOutOfRange(const std::string& what) : Error(what) {}
};

/// The chat backend cannot serve a decision (transport failure after
/// retries, replay miss, transcript drift). Unlike ordinary policy
/// failures this aborts the run cell instead of degrading to a wait.
struct BridgeUnavailable : Error {
  explicit BridgeUnavailable(const std::string& what) : Error(what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace clocksim
