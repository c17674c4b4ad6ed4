#include "clocksim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "clocksim/errors.hpp"

namespace clocksim {

namespace {

constexpr double kEnumTol = 1e-12;

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Sum over tie groups of t^3 - t, for the tie corrections.
double tie_term(const std::vector<double>& pooled) {
  std::map<double, int> counts;
  for (const double v : pooled) counts[v] += 1;
  double sum = 0.0;
  for (const auto& [value, t] : counts) {
    sum += static_cast<double>(t) * t * t - t;
  }
  return sum;
}

/// Regularized lower incomplete gamma P(a, x) by series expansion (x < a+1).
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Regularized upper incomplete gamma Q(a, x) by Lentz continued fraction
/// (x >= a+1).
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

struct RankedGroups {
  std::vector<std::vector<double>> ranks;  // per group, midranks in the pool
  std::vector<double> pooled;
  int total = 0;
};

RankedGroups rank_groups(const std::vector<SampleGroup>& groups) {
  RankedGroups out;
  std::vector<std::size_t> sizes;
  for (const auto& g : groups) {
    if (g.values.empty()) throw InvalidParameter("sample group '" + g.label + "' is empty");
    for (const double v : g.values) {
      if (!std::isfinite(v)) {
        throw InvalidParameter("sample group '" + g.label + "' has a non-finite value");
      }
    }
    sizes.push_back(g.values.size());
    out.pooled.insert(out.pooled.end(), g.values.begin(), g.values.end());
  }
  out.total = static_cast<int>(out.pooled.size());
  const std::vector<double> r = midranks(out.pooled);
  std::size_t offset = 0;
  for (const std::size_t size : sizes) {
    out.ranks.emplace_back(r.begin() + static_cast<std::ptrdiff_t>(offset),
                           r.begin() + static_cast<std::ptrdiff_t>(offset + size));
    offset += size;
  }
  return out;
}

/// Tie-corrected H for one assignment of pooled ranks to group sizes.
double h_statistic(const std::vector<double>& ranks,
                   const std::vector<int>& group_of, int k, int n,
                   double tie_denominator) {
  std::vector<double> rank_sum(static_cast<std::size_t>(k), 0.0);
  std::vector<int> count(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    rank_sum[static_cast<std::size_t>(group_of[i])] += ranks[i];
    count[static_cast<std::size_t>(group_of[i])] += 1;
  }
  double h = 0.0;
  for (int g = 0; g < k; ++g) {
    h += rank_sum[static_cast<std::size_t>(g)] * rank_sum[static_cast<std::size_t>(g)] /
         count[static_cast<std::size_t>(g)];
  }
  h = 12.0 / (static_cast<double>(n) * (n + 1)) * h - 3.0 * (n + 1);
  return h / tie_denominator;
}

/// Exact permutation tail P(H >= observed) over every assignment of pooled
/// indices to the group sizes.
double kw_exact_tail(const std::vector<double>& ranks, std::vector<int> sizes,
                     double observed, double tie_denominator) {
  const int n = static_cast<int>(ranks.size());
  const int k = static_cast<int>(sizes.size());
  std::vector<int> group_of(static_cast<std::size_t>(n), -1);
  std::uint64_t hits = 0;
  std::uint64_t total = 0;

  // Assign positions in order; each unassigned position takes the first
  // group with remaining capacity, recursively.
  auto recurse = [&](auto&& self, int pos) -> void {
    if (pos == n) {
      ++total;
      if (h_statistic(ranks, group_of, k, n, tie_denominator) >= observed - kEnumTol) {
        ++hits;
      }
      return;
    }
    for (int g = 0; g < k; ++g) {
      if (sizes[static_cast<std::size_t>(g)] == 0) continue;
      sizes[static_cast<std::size_t>(g)] -= 1;
      group_of[static_cast<std::size_t>(pos)] = g;
      self(self, pos + 1);
      sizes[static_cast<std::size_t>(g)] += 1;
    }
    group_of[static_cast<std::size_t>(pos)] = -1;
  };
  recurse(recurse, 0);
  return static_cast<double>(hits) / static_cast<double>(total);
}

/// Exact permutation tail P(|U - mu| >= |observed - mu|) over all
/// C(n, n_a) subsets taking the role of group a.
double mw_exact_tail(const std::vector<double>& ranks, int n_a, double observed_dev) {
  const int n = static_cast<int>(ranks.size());
  std::vector<int> idx(static_cast<std::size_t>(n_a));
  std::iota(idx.begin(), idx.end(), 0);
  const double mu = static_cast<double>(n_a) * (n - n_a) / 2.0;
  const double base = static_cast<double>(n_a) * (n_a + 1) / 2.0;

  std::uint64_t hits = 0;
  std::uint64_t total = 0;
  while (true) {
    double rank_sum = 0.0;
    for (const int i : idx) rank_sum += ranks[static_cast<std::size_t>(i)];
    const double u_a = rank_sum - base;
    ++total;
    if (std::abs(u_a - mu) >= observed_dev - kEnumTol) ++hits;

    // next combination
    int pos = n_a - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - n_a + pos) --pos;
    if (pos < 0) break;
    idx[static_cast<std::size_t>(pos)] += 1;
    for (int j = pos + 1; j < n_a; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

std::vector<double> midranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&values](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double chi2_sf(double x, int df) {
  if (df < 1) throw InvalidParameter("chi2_sf needs a positive df");
  if (x < 0.0) throw InvalidParameter("chi2_sf needs a nonnegative statistic");
  if (x == 0.0) return 1.0;
  const double a = df / 2.0;
  const double half = x / 2.0;
  if (half < a + 1.0) return 1.0 - gamma_p_series(a, half);
  return gamma_q_cf(a, half);
}

TestResult kruskal_wallis(const std::vector<SampleGroup>& groups) {
  TestResult result;
  for (const auto& g : groups) {
    if (g.values.empty()) throw InvalidParameter("sample group '" + g.label + "' is empty");
    result.medians.push_back(median_of(g.values));
  }
  if (groups.size() < 2) {
    result.p_value = result.p_asymptotic = 1.0;
    result.method = "degenerate";
    return result;
  }

  const RankedGroups ranked = rank_groups(groups);
  const int n = ranked.total;
  const int k = static_cast<int>(groups.size());
  result.df = k - 1;

  const double ties = tie_term(ranked.pooled);
  const double tie_denominator =
      1.0 - ties / (static_cast<double>(n) * n * n - n);
  if (tie_denominator <= 0.0) {
    // Every pooled value identical: no between-group variation by fiat.
    result.p_value = result.p_asymptotic = 1.0;
    result.method = "degenerate";
    return result;
  }

  std::vector<int> group_of;
  std::vector<int> sizes;
  for (int g = 0; g < k; ++g) {
    const auto size = static_cast<int>(groups[static_cast<std::size_t>(g)].values.size());
    sizes.push_back(size);
    group_of.insert(group_of.end(), static_cast<std::size_t>(size), g);
  }
  std::vector<double> pooled_ranks = midranks(ranked.pooled);
  result.statistic = h_statistic(pooled_ranks, group_of, k, n, tie_denominator);
  result.p_asymptotic = chi2_sf(std::max(result.statistic, 0.0), k - 1);

  if (n <= kExactEnumerationLimit) {
    result.p_exact =
        kw_exact_tail(pooled_ranks, sizes, result.statistic, tie_denominator);
    result.p_value = *result.p_exact;
    result.method = "exact";
  } else {
    result.p_value = result.p_asymptotic;
    result.method = "asymptotic";
  }
  return result;
}

TestResult mann_whitney_u(const SampleGroup& a, const SampleGroup& b) {
  const RankedGroups ranked = rank_groups({a, b});
  TestResult result;
  result.medians = {median_of(a.values), median_of(b.values)};

  const auto n_a = static_cast<double>(a.values.size());
  const auto n_b = static_cast<double>(b.values.size());
  const int n = ranked.total;

  double rank_sum_a = 0.0;
  for (const double r : ranked.ranks[0]) rank_sum_a += r;
  const double u_a = rank_sum_a - n_a * (n_a + 1) / 2.0;
  const double u_b = n_a * n_b - u_a;
  result.statistic = std::min(u_a, u_b);

  const double mu = n_a * n_b / 2.0;
  const double ties = tie_term(ranked.pooled);
  const double variance =
      n_a * n_b / 12.0 *
      ((n + 1) - ties / (static_cast<double>(n) * (n - 1)));
  double z = 0.0;
  if (variance > 0.0) {
    z = std::max(std::abs(result.statistic - mu) - 0.5, 0.0) / std::sqrt(variance);
  }
  result.p_asymptotic = std::min(1.0, 2.0 * normal_sf(z));
  result.effect_size = std::abs(z) / std::sqrt(static_cast<double>(n));

  if (n <= kExactEnumerationLimit) {
    result.p_exact = mw_exact_tail(midranks(ranked.pooled),
                                   static_cast<int>(a.values.size()),
                                   std::abs(result.statistic - mu));
    result.p_value = *result.p_exact;
    result.method = "exact";
  } else {
    result.p_value = result.p_asymptotic;
    result.method = "asymptotic";
  }
  return result;
}

void to_json(nlohmann::json& j, const TestResult& result) {
  j = nlohmann::json{
      {"statistic", result.statistic},
      {"p_value", result.p_value},
      {"p_asymptotic", result.p_asymptotic},
      {"medians", result.medians},
      {"method", result.method},
  };
  if (result.p_exact) j["p_exact"] = *result.p_exact;
  if (result.effect_size) j["effect_size"] = *result.effect_size;
  if (result.df) j["df"] = *result.df;
}

}  // namespace clocksim
