#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "adaptmt/error.hpp"
#include "adaptmt/normal.hpp"
#include "adaptmt/sim.hpp"
#include "doctest.h"

using namespace adaptmt;
using namespace adaptmt::sim;

namespace {

double ks_uniform(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    d = std::max({d, (static_cast<double>(i) + 1) / n - x[i], x[i] - static_cast<double>(i) / n});
  return d;
}

SimulationConfig small_config(std::vector<double> effects, DroppingRule rule) {
  SimulationConfig c;
  c.scenario.label = "test";
  c.scenario.effects = std::move(effects);
  c.rule = rule;
  c.combo_replicates = 400;
  c.cer_stage1_replicates = 30;
  c.cer_stage2_replicates = 4;
  c.seed = 77;
  return c;
}

void check_same(const Estimate& a, const Estimate& b) {
  CHECK(a.value == b.value);
  CHECK(a.se == b.se);
}

void check_same(const std::optional<Estimate>& a, const std::optional<Estimate>& b) {
  REQUIRE(a.has_value() == b.has_value());
  if (a) check_same(*a, *b);
}

}  // namespace

TEST_CASE("null p-values are uniform") {
  Scenario sc{"null", {0, 0, 0, 0}, 1.0, 0.5};
  const std::vector<int> sizes(5, 20);
  const int N = 100'000;
  std::vector<std::vector<double>> p(8, std::vector<double>(N));
  for (int i = 0; i < N; ++i) {
    auto rng = make_rng(1, i, 0);
    const auto s = simulate_stage_data(sc, sizes, rng);
    REQUIRE(s.p.size() == 8);
    for (int h = 0; h < 8; ++h) p[h][i] = s.p[h];
  }
  for (int h = 0; h < 8; ++h) {
    CAPTURE(h);
    CHECK(ks_uniform(p[h]) < 0.01);
  }
}

TEST_CASE("marginal power against the normal approximation") {
  Scenario sc{"alt", {0.4}, 1.0, 0.5};
  const std::vector<int> sizes{100, 100};
  const double oracle = std_normal_cdf(0.4 * std::sqrt(50.0) - 1.959963984540054);
  const int N = 50'000;
  long hits = 0;
  for (int i = 0; i < N; ++i) {
    auto rng = make_rng(2, i, 0);
    hits += simulate_stage_data(sc, sizes, rng).p[0] <= 0.025;
  }
  CHECK(std::abs(static_cast<double>(hits) / N - oracle) <= 0.01);
}

TEST_CASE("perfectly correlated endpoints give equal p-values") {
  Scenario sc{"rho1", {0.3, 0.0, -0.2}, 2.0, 1.0};
  const std::vector<int> sizes{15, 15, 15, 15};
  for (int i = 0; i < 200; ++i) {
    auto rng = make_rng(3, i, 0);
    const auto s = simulate_stage_data(sc, sizes, rng);
    for (int a = 0; a < 3; ++a) CHECK(std::abs(s.p[a] - s.p[3 + a]) <= 1e-12);
  }
}

TEST_CASE("absent arms have unit p-values") {
  Scenario sc{"gap", {0.3, 0.3}, 1.0, 0.5};
  const std::vector<int> sizes{10, 0, 10};
  auto rng = make_rng(4, 0, 0);
  const auto s = simulate_stage_data(sc, sizes, rng);
  CHECK(s.p[0] == 1.0);
  CHECK(s.p[2] == 1.0);
  CHECK(s.p[1] < 1.0);
}

TEST_CASE("pooled t p-value") {
  CHECK(pooled_t_pvalue(0.0, 10.0, 10, 0.0, 10.0, 10) == doctest::Approx(0.5));
  // Unit pooled variance, t = 1 / sqrt(2/10) on 18 df.
  CHECK(std::abs(pooled_t_pvalue(1.0, 9.0, 10, 0.0, 9.0, 10) - 0.0191248073) <= 1e-8);
}

TEST_CASE("dropping rules") {
  const std::vector<bool> all(4, true);
  const auto n = apply_dropping_rule(DroppingRule::Normal, std::vector{0.1, 0.6, 0.2, 0.7}, all, 50);
  CHECK(n.continuing == std::vector<bool>{true, false, true, false});
  // 100 freed subjects over control and two arms, remainder to control.
  CHECK(n.sizes == std::vector<int>{84, 83, 0, 83, 0});

  const auto u = apply_dropping_rule(DroppingRule::UltraAggressive, std::vector{0.3, 0.1, 0.2, 0.4}, all, 50);
  CHECK(u.continuing == std::vector<bool>{false, true, false, false});
  CHECK(u.sizes == std::vector<int>{125, 0, 125, 0, 0});

  const auto c = apply_dropping_rule(DroppingRule::Conservative, std::vector{0.7, 0.1, 0.74, 0.4}, all, 50);
  CHECK(c.continuing == all);
  CHECK(c.sizes == std::vector<int>(5, 50));

  const auto a = apply_dropping_rule(DroppingRule::Aggressive, std::vector{0.3, 0.2, 0.9, 0.25}, all, 50);
  CHECK(a.continuing == std::vector<bool>{false, true, false, false});

  const auto none = apply_dropping_rule(DroppingRule::Aggressive, std::vector{0.3, 0.6, 0.9, 0.8}, all, 50);
  CHECK(none.continuing == std::vector<bool>{true, false, false, false});
  const auto stop =
      apply_dropping_rule(DroppingRule::Aggressive, std::vector{0.3, 0.6, 0.9, 0.8}, all, 50, AllDroppedPolicy::StopTrial);
  CHECK(std::none_of(stop.continuing.begin(), stop.continuing.end(), [](bool b) { return b; }));

  const std::vector<bool> some{false, true, true, true};
  const auto skip = apply_dropping_rule(DroppingRule::UltraAggressive, std::vector{0.01, 0.1, 0.2, 0.4}, some, 50);
  CHECK(skip.continuing == std::vector<bool>{false, true, false, false});

  CHECK(parse_dropping_rule("Moderate") == DroppingRule::Normal);
  CHECK(parse_dropping_rule("ultra_aggressive") == DroppingRule::UltraAggressive);
  CHECK(parse_dropping_rule("Ultra Aggressive") == DroppingRule::UltraAggressive);
  CHECK_THROWS_AS(parse_dropping_rule("reckless"), ValidationError);
}

TEST_CASE("nested estimator") {
  NestedEstimator plain;
  const std::vector<int> x{1, 0, 0, 1, 1, 0, 1, 1, 0, 0};
  for (int v : x) plain.add_cluster(v, 1);
  CHECK(plain.mean() == doctest::Approx(0.5));
  // Single-draw clusters give the binomial standard error with n-1.
  CHECK(plain.standard_error() == doctest::Approx(std::sqrt(0.5 * 0.5 * 10 / 9 / 10)));

  NestedEstimator a, b, all;
  const std::vector<int> s{3, 5, 0, 4, 2, 5};
  for (std::size_t i = 0; i < s.size(); ++i) {
    (i % 2 ? a : b).add_cluster(s[i], 5);
    all.add_cluster(s[i], 5);
  }
  NestedEstimator ab = a, ba = b;
  ab.merge(b);
  ba.merge(a);
  CHECK(ab.mean() == all.mean());
  CHECK(ba.standard_error() == all.standard_error());
  CHECK(all.mean() == doctest::Approx(19.0 / 30));
  CHECK_THROWS_AS(all.add_cluster(1, 4), ValidationError);

  NestedEstimator same;
  for (int i = 0; i < 5; ++i) same.add_cluster(3, 3);
  CHECK(same.mean() == 1.0);
  CHECK(same.standard_error() == 0.0);
}

TEST_CASE("configuration validation") {
  auto c = small_config({0.4, 0, 0, 0}, DroppingRule::Conservative);
  CHECK_NOTHROW(c.validate());
  c.combo_replicates = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = small_config({0.4, 0, 0, 0}, DroppingRule::Conservative);
  c.cer_stage2_replicates = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = small_config({0.4, 0, 0, 0}, DroppingRule::Conservative);
  c.interim_fraction = 1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = small_config({0.4, 0, 0, 0}, DroppingRule::Conservative);
  c.scenario.rho = 1.5;
  CHECK_THROWS_AS(run_study(c), ValidationError);
}

TEST_CASE("results do not depend on the thread count") {
  auto c = small_config({0.4, 0.4, 0, 0}, DroppingRule::Normal);
  const auto one = run_study(c);
  c.threads = 3;
  const auto three = run_study(c);
  REQUIRE(one.size() == 2);
  REQUIRE(three.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(one[i].method == three[i].method);
    CHECK(one[i].clusters == three[i].clusters);
    CHECK(one[i].draws == three[i].draws);
    check_same(one[i].disjunctive, three[i].disjunctive);
    check_same(one[i].conjunctive, three[i].conjunctive);
    check_same(one[i].fwer, three[i].fwer);
    REQUIRE(one[i].rejection_rate.size() == 8);
    for (std::size_t h = 0; h < 8; ++h) check_same(one[i].rejection_rate[h], three[i].rejection_rate[h]);
  }
  CHECK(one[0].clusters == 30);
  CHECK(one[0].draws == 120);
  CHECK(one[1].draws == 400);
}

TEST_CASE("report fields follow the scenario") {
  const auto s4 = run_study(small_config({0.4, 0.4, 0.4, 0.4}, DroppingRule::Conservative));
  for (const auto& r : s4) {
    CHECK_FALSE(r.fwer.has_value());
    CHECK(r.disjunctive.has_value());
  }
  const auto null = run_study(small_config({0, 0, 0, 0}, DroppingRule::Conservative));
  for (const auto& r : null) {
    CHECK_FALSE(r.disjunctive.has_value());
    CHECK_FALSE(r.conjunctive.has_value());
    CHECK(r.fwer.has_value());
    CHECK(r.fwer->value <= 0.2);
  }
  std::ostringstream os;
  write_power_csv(os, null);
  const std::string csv = os.str();
  CHECK(csv.rfind("scenario,rule,rho,method,disjunctive,disjunctive_se,conjunctive,conjunctive_se,fwer,fwer_se", 0) == 0);
  CHECK(csv.find("n/a") != std::string::npos);
}

TEST_CASE("stopping when every arm is dropped leaves nothing to reject") {
  auto c = small_config({-3, -3, -3, -3}, DroppingRule::Conservative);
  c.all_dropped = AllDroppedPolicy::StopTrial;
  for (const auto& r : run_study(c)) {
    REQUIRE(r.fwer.has_value());
    CHECK(r.fwer->value == 0.0);
    CHECK(r.fwer->se == 0.0);
  }
}

TEST_CASE("nested and plain Monte Carlo agree") {
  SimulationConfig c = small_config({0.4, 0.4, 0.4, 0.4}, DroppingRule::Normal);
  c.methods = {Method::Cer};
  c.cer_stage1_replicates = 1500;
  c.cer_stage2_replicates = 1;
  const auto plain = run_study(c).front();
  c.cer_stage1_replicates = 150;
  c.cer_stage2_replicates = 10;
  c.seed = 78;
  const auto nested = run_study(c).front();
  for (auto pick : {&PowerReport::disjunctive, &PowerReport::conjunctive}) {
    const Estimate a = *(plain.*pick), b = *(nested.*pick);
    CHECK(std::abs(a.value - b.value) <= 3 * std::hypot(a.se, b.se));
  }
}
