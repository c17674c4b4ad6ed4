#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <string>

namespace clocksim {

/// Currency amount in exact integer cents. All schedule prices, wages and
/// per-round costs are kept on the cent grid so that threshold comparisons
/// (e.g. a net payoff of exactly -$0.01) can never be flipped by floating
/// point drift.
class Money {
 public:
  constexpr Money() = default;

  static constexpr Money from_cents(std::int64_t cents) { return Money(cents); }

  /// Rounds to the nearest cent.
  static Money from_dollars(double dollars) {
    return Money(static_cast<std::int64_t>(std::llround(dollars * 100.0)));
  }

  constexpr std::int64_t cents() const { return cents_; }
  constexpr double dollars() const { return static_cast<double>(cents_) / 100.0; }

  /// "$13.75" (negative amounts render as "-$2.34").
  std::string str() const {
    const std::int64_t a = std::llabs(cents_);
    std::string s = (cents_ < 0) ? "-$" : "$";
    s += std::to_string(a / 100);
    s += '.';
    s += static_cast<char>('0' + (a / 10) % 10);
    s += static_cast<char>('0' + a % 10);
    return s;
  }

  friend constexpr auto operator<=>(Money, Money) = default;

  constexpr Money operator+(Money rhs) const { return Money(cents_ + rhs.cents_); }
  constexpr Money operator-(Money rhs) const { return Money(cents_ - rhs.cents_); }
  constexpr Money operator-() const { return Money(-cents_); }
  constexpr Money operator*(std::int64_t k) const { return Money(cents_ * k); }
  constexpr Money& operator+=(Money rhs) {
    cents_ += rhs.cents_;
    return *this;
  }
  constexpr Money& operator-=(Money rhs) {
    cents_ -= rhs.cents_;
    return *this;
  }

 private:
  constexpr explicit Money(std::int64_t cents) : cents_(cents) {}
  std::int64_t cents_ = 0;
};

constexpr Money operator*(std::int64_t k, Money m) { return m * k; }

}  // namespace clocksim
