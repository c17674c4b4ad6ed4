#include "clocksim/metrics.hpp"

#include "clocksim/errors.hpp"

namespace clocksim {

Metrics summarize(const MarketParams& params,
                  const std::vector<AuctionRecord>& records, int num_drivers) {
  if (records.empty()) throw InvalidParameter("summarize needs at least one record");
  if (num_drivers < 1) throw InvalidParameter("num_drivers must be positive");

  Metrics m;
  m.auctions = static_cast<int>(records.size());
  m.gross_earnings.assign(static_cast<std::size_t>(num_drivers), Money{});

  std::int64_t price_cents = 0;
  std::int64_t display_rounds = 0;
  int won = 0;
  for (const auto& record : records) {
    if (record.expired) {
      m.expired += 1;
      continue;
    }
    won += 1;
    price_cents += record.winning_price->cents();
    display_rounds += *record.winning_round + 1;
    m.gross_earnings[static_cast<std::size_t>(*record.winner - 1)] +=
        *record.winning_price;
  }

  if (won > 0) {
    m.avg_price = static_cast<double>(price_cents) / won / 100.0;
    m.avg_rounds = static_cast<double>(display_rounds) / won;
    m.profit_share =
        (params.customer_price.dollars() - *m.avg_price) / params.customer_price.dollars();
  }
  return m;
}

}  // namespace clocksim
