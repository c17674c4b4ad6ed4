#include "clocksim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "clocksim/errors.hpp"

#include "doctest.h"
#include "exhaustive_oracles.hpp"

using namespace clocksim;
using oracles::Lcg;

namespace {
constexpr auto oracle_mw_exact_p = oracles::mw_exact_p;
constexpr auto oracle_kw_exact_p = oracles::kw_exact_p;
}  // namespace

TEST_CASE("survival functions match high-precision reference values") {
  // Reference values computed with 30-digit arithmetic before the build.
  CHECK(normal_sf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(normal_sf(1.0) == doctest::Approx(0.15865525393145705).epsilon(1e-10));
  CHECK(normal_sf(1.959964) == doctest::Approx(0.0249999990964424).epsilon(1e-10));
  CHECK(normal_sf(-2.5) == doctest::Approx(0.9937903346742238).epsilon(1e-10));
  CHECK(normal_sf(3.7) == doctest::Approx(0.00010779973347738826).epsilon(1e-8));
  CHECK(normal_sf(5.0) == doctest::Approx(2.866515718791939e-07).epsilon(1e-8));

  CHECK(chi2_sf(0.0, 3) == 1.0);
  CHECK(chi2_sf(4.571428571428571, 2) == doctest::Approx(0.10170139230422684).epsilon(1e-10));
  CHECK(chi2_sf(9.21034037197618, 2) == doctest::Approx(0.010000000000000014).epsilon(1e-10));
  CHECK(chi2_sf(12.591587243743977, 6) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(chi2_sf(1.5, 1) == doctest::Approx(0.2206713619198468).epsilon(1e-10));
  CHECK(chi2_sf(30.0, 6) == doctest::Approx(3.930844818448461e-05).epsilon(1e-8));
  CHECK(chi2_sf(2.0, 4) == doctest::Approx(0.7357588823428847).epsilon(1e-10));
  CHECK(chi2_sf(0.5, 9) == doctest::Approx(0.9999695662588389).epsilon(1e-10));
  CHECK(chi2_sf(45.5, 17) == doctest::Approx(0.00020507241458958238).epsilon(1e-8));
  CHECK_THROWS_AS(chi2_sf(1.0, 0), InvalidParameter);
  CHECK_THROWS_AS(chi2_sf(-0.5, 2), InvalidParameter);
}

TEST_CASE("identical groups carry no between-group signal") {
  const std::vector<SampleGroup> groups{
      {"a", {1, 2, 3}}, {"b", {1, 2, 3}}, {"c", {1, 2, 3}}};
  const auto result = kruskal_wallis(groups);
  CHECK(result.statistic == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(result.p_value == doctest::Approx(1.0));
}

TEST_CASE("fully ordered groups match the exact enumeration") {
  const std::vector<SampleGroup> groups{{"a", {1, 2}}, {"b", {3, 4}}, {"c", {5, 6}}};
  const auto result = kruskal_wallis(groups);
  CHECK(result.statistic == doctest::Approx(32.0 / 7.0).epsilon(1e-12));
  CHECK(result.df == 2);
  REQUIRE(result.p_exact.has_value());
  CHECK(*result.p_exact == doctest::Approx(6.0 / 90.0).epsilon(1e-12));
  CHECK(result.p_value == *result.p_exact);
  CHECK(result.p_asymptotic ==
        doctest::Approx(chi2_sf(32.0 / 7.0, 2)).epsilon(1e-12));
  CHECK(*result.p_exact == doctest::Approx(oracle_kw_exact_p({{1, 2}, {3, 4}, {5, 6}})));
}

TEST_CASE("degenerate inputs take the documented fallbacks") {
  CHECK(kruskal_wallis({{"only", {1, 2, 3}}}).p_value == 1.0);
  CHECK(kruskal_wallis({{"a", {5, 5}}, {"b", {5, 5, 5}}}).p_value == 1.0);
  CHECK_THROWS_AS(kruskal_wallis({{"a", {1}}, {"b", {}}}), InvalidParameter);
  CHECK_THROWS_AS(mann_whitney_u({"a", {}}, {"b", {1}}), InvalidParameter);
  CHECK_THROWS_AS(mann_whitney_u({"a", {1.0, std::nan("")}}, {"b", {1}}),
                  InvalidParameter);
}

TEST_CASE("complete separation drives U to zero") {
  const auto result = mann_whitney_u({"low", {1, 2, 3}}, {"high", {4, 5, 6}});
  CHECK(result.statistic == 0.0);
  REQUIRE(result.p_exact.has_value());
  CHECK(*result.p_exact == doctest::Approx(0.1));  // 2 of C(6,3) labelings as extreme
  CHECK(result.medians == std::vector<double>{2.0, 5.0});
}

TEST_CASE("identical samples sit at the center of the U distribution") {
  const auto result = mann_whitney_u({"a", {1, 2, 3}}, {"b", {1, 2, 3}});
  CHECK(result.statistic == doctest::Approx(4.5));
  CHECK(result.p_value == doctest::Approx(1.0));
  CHECK(*result.effect_size == doctest::Approx(0.0));
}

TEST_CASE("label symmetry: swapping the samples changes nothing") {
  Lcg rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const SampleGroup a{"a", rng.sample(3 + rng.next(5), 6)};
    const SampleGroup b{"b", rng.sample(3 + rng.next(5), 6)};
    const auto ab = mann_whitney_u(a, b);
    const auto ba = mann_whitney_u(b, a);
    CHECK(ab.statistic == doctest::Approx(ba.statistic).epsilon(1e-12));
    CHECK(ab.p_value == doctest::Approx(ba.p_value).epsilon(1e-12));
    CHECK(*ab.effect_size == doctest::Approx(*ba.effect_size).epsilon(1e-12));
  }
}

TEST_CASE("rank tests are invariant under strictly increasing transforms") {
  Lcg rng(7);
  auto transform = [](std::vector<double> v) {
    for (double& x : v) x = std::exp(0.3 * x) - 5.0;
    return v;
  };
  for (int trial = 0; trial < 30; ++trial) {
    const std::vector<double> a = rng.sample(4 + rng.next(8), 5);
    const std::vector<double> b = rng.sample(4 + rng.next(8), 5);
    const std::vector<double> c = rng.sample(4 + rng.next(8), 5);

    const auto mw1 = mann_whitney_u({"a", a}, {"b", b});
    const auto mw2 = mann_whitney_u({"a", transform(a)}, {"b", transform(b)});
    CHECK(mw1.statistic == doctest::Approx(mw2.statistic).epsilon(1e-12));
    CHECK(mw1.p_value == doctest::Approx(mw2.p_value).epsilon(1e-12));

    const auto kw1 = kruskal_wallis({{"a", a}, {"b", b}, {"c", c}});
    const auto kw2 =
        kruskal_wallis({{"a", transform(a)}, {"b", transform(b)}, {"c", transform(c)}});
    CHECK(kw1.statistic == doctest::Approx(kw2.statistic).epsilon(1e-10));
    CHECK(kw1.p_value == doctest::Approx(kw2.p_value).epsilon(1e-10));
  }
}

TEST_CASE("effect size stays inside [0, 1]") {
  Lcg rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const auto result = mann_whitney_u({"a", rng.sample(2 + rng.next(10), 4)},
                                       {"b", rng.sample(2 + rng.next(10), 4)});
    CHECK(*result.effect_size >= 0.0);
    CHECK(*result.effect_size <= 1.0);
  }
}

TEST_CASE("small-sample p-values agree with the exhaustive oracles") {
  Lcg rng(123);
  for (int n_a = 1; n_a <= 9; ++n_a) {
    for (int n_b = 1; n_a + n_b <= 10; ++n_b) {
      for (int trial = 0; trial < 3; ++trial) {
        const SampleGroup a{"a", rng.sample(n_a, 5)};
        const SampleGroup b{"b", rng.sample(n_b, 5)};
        const auto result = mann_whitney_u(a, b);
        CHECK(result.method == "exact");
        const double oracle = oracle_mw_exact_p(a.values, b.values);
        CHECK(result.p_value == doctest::Approx(oracle).epsilon(1e-9));
        CHECK(std::abs(result.p_value - oracle) <= 0.02);
      }
    }
  }
}

TEST_CASE("kruskal-wallis agrees with its exhaustive oracle at small sizes") {
  Lcg rng(321);
  const std::vector<std::vector<int>> size_sets{
      {2, 2, 2}, {3, 3, 3}, {2, 3, 4}, {1, 4, 5}, {5, 5}, {2, 8}, {3, 3, 2, 2}};
  for (const auto& sizes : size_sets) {
    for (int trial = 0; trial < 2; ++trial) {
      std::vector<SampleGroup> groups;
      std::vector<std::vector<double>> plain;
      for (std::size_t g = 0; g < sizes.size(); ++g) {
        const auto values = rng.sample(sizes[g], 5);
        groups.push_back({"g" + std::to_string(g), values});
        plain.push_back(values);
      }
      const auto result = kruskal_wallis(groups);
      CHECK(result.method == "exact");
      const double oracle = oracle_kw_exact_p(plain);
      CHECK(result.p_value == doctest::Approx(oracle).epsilon(1e-9));
      CHECK(std::abs(result.p_value - oracle) <= 0.02);
    }
  }
}

TEST_CASE("two-group kruskal-wallis tracks mann-whitney") {
  Lcg rng(555);
  for (int trial = 0; trial < 20; ++trial) {
    const SampleGroup a{"a", rng.sample(2 + rng.next(4), 5)};
    const SampleGroup b{"b", rng.sample(2 + rng.next(4), 5)};
    const auto kw = kruskal_wallis({a, b});
    const auto mw = mann_whitney_u(a, b);
    // Both are exact at these sizes and test the same hypothesis, so the
    // permutation p-values coincide.
    CHECK(kw.p_value == doctest::Approx(mw.p_value).epsilon(1e-9));
  }
}

TEST_CASE("large samples fall back to the asymptotic route") {
  Lcg rng(777);
  const auto a = rng.sample(30, 8);
  const auto b = rng.sample(35, 8);
  const auto mw = mann_whitney_u({"a", a}, {"b", b});
  CHECK(mw.method == "asymptotic");
  CHECK_FALSE(mw.p_exact.has_value());
  CHECK(mw.p_value == mw.p_asymptotic);
  CHECK(mw.p_value >= 0.0);
  CHECK(mw.p_value <= 1.0);

  const auto kw = kruskal_wallis({{"a", a}, {"b", b}, {"c", rng.sample(28, 8)}});
  CHECK(kw.method == "asymptotic");
  CHECK(kw.p_value == chi2_sf(kw.statistic, 2));
}

TEST_CASE("test results serialize to JSON") {
  const nlohmann::json j = mann_whitney_u({"a", {1, 2, 3}}, {"b", {4, 5, 6}});
  CHECK(j["statistic"] == 0.0);
  CHECK(j["method"] == "exact");
  CHECK(j.contains("effect_size"));
  CHECK(j["medians"].size() == 2);
}
