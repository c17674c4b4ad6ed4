#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace clocksim {

struct SampleGroup {
  std::string label;
  std::vector<double> values;
};

/// All sample totals up to this size get an exhaustive-permutation p-value;
/// larger samples use the asymptotic approximation. The asymptotic p is
/// always reported alongside for inspection.
inline constexpr int kExactEnumerationLimit = 10;

struct TestResult {
  double statistic = 0.0;  // H for Kruskal-Wallis, min-U for Mann-Whitney
  double p_value = 0.0;    // exact when the total sample fits the limit
  double p_asymptotic = 0.0;
  std::optional<double> p_exact;
  std::optional<double> effect_size;  // r = |z| / sqrt(n), Mann-Whitney only
  std::optional<int> df;
  std::vector<double> medians;  // per input group
  std::string method;           // "exact" or "asymptotic"
};

/// Rank test across two or more groups: tie-corrected H, p from the
/// chi-square survival function with k-1 degrees of freedom (or exact
/// enumeration for small totals). Degenerate inputs (fewer than two groups,
/// or every value identical) yield H = 0, p = 1.
TestResult kruskal_wallis(const std::vector<SampleGroup>& groups);

/// Two-sample rank test: U = min(U_a, U_b); two-sided p via the normal
/// approximation with continuity and tie correction (or exact enumeration
/// for small totals); effect size r = |z| / sqrt(n_a + n_b).
TestResult mann_whitney_u(const SampleGroup& a, const SampleGroup& b);

/// Upper tail of the chi-square distribution, accurate to 1e-8 absolute.
double chi2_sf(double x, int df);

/// Upper tail of the standard normal distribution.
double normal_sf(double z);

/// Midranks of `values` (average rank across ties).
std::vector<double> midranks(const std::vector<double>& values);

void to_json(nlohmann::json& j, const TestResult& result);

}  // namespace clocksim
