#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tco/scenario.hpp"

#include <algorithm>
#include <cmath>

using namespace tco;

namespace {

ScenarioConfig noise_free_config() {
  ScenarioConfig c;
  c.spec = PerturbationSpec::noise_free();
  return c;
}

double det_total(const ScenarioConfig& c, std::int64_t n, double m, double t) {
  return deterministic_tco(ScenarioPoint<double>{n, m, t}, c.params, c.table).total;
}

}  // namespace

TEST_CASE("config defaults") {
  const ScenarioConfig c;
  CHECK(c.horizon_years == 50.0);
  CHECK(c.time_step == 1.0);
  CHECK(c.populations == std::vector<std::int64_t>{5000, 10000, 50000});
  CHECK(c.m_min == 1);
  CHECK(c.m_max == 200);
  CHECK(c.time_grid().size() == 51);
  CHECK(c.time_grid().back() == 50.0);
  CHECK_NOTHROW(c.validate());

  ScenarioConfig bad;
  bad.horizon_years = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ScenarioConfig{};
  bad.m_max = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ScenarioConfig{};
  bad.populations = {5000, 0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("subscriber growth presets") {
  SubscriberGrowth g;
  CHECK(g(0.0) == 5000);
  CHECK(g(30.0) == 5000);
  g.kind = SubscriberGrowth::Kind::Linear;
  g.rate = 100.0;
  CHECK(g(10.0) == 6000);
  g.kind = SubscriberGrowth::Kind::Logistic;
  g.rate = 0.3;
  g.capacity = 20000.0;
  CHECK(g(0.0) == 5000);
  CHECK(g(200.0) == 20000);
  CHECK(g(10.0) > g(5.0));
  g.kind = SubscriberGrowth::Kind::Linear;
  g.rate = -200.0;
  CHECK_THROWS_AS(g.validate(50.0), std::invalid_argument);
  CHECK(parse_growth_kind("logistic") == SubscriberGrowth::Kind::Logistic);
  CHECK_THROWS_AS(parse_growth_kind("exponential"), std::invalid_argument);
}

TEST_CASE("noise-free time sweep follows the deterministic model") {
  const auto c = noise_free_config();
  const auto s = sweep_time(c, 5000, 10.0);
  REQUIRE(s.points.size() == 51);
  for (std::size_t j = 0; j < s.points.size(); ++j) {
    CHECK(s.points[j].x == static_cast<double>(j));
    CHECK(s.points[j].value == det_total(c, 5000, 10.0, s.points[j].x));
    if (j > 0) CHECK(s.points[j].value >= s.points[j - 1].value);
  }
  const auto b0 = deterministic_tco(ScenarioPoint<double>{5000, 10.0, 0.0}, c.params, c.table);
  for (int i = 0; i < kDeviceCount; ++i) CHECK(b0.opex(i) == 0.0);
  CHECK(b0.total == s.points[0].value);
  CHECK_THROWS_AS(sweep_time(c, 5000, 6000.0), std::domain_error);
}

TEST_CASE("noisy time sweep is reproducible and seed dependent") {
  ScenarioConfig c;
  c.spec.seed = 3;
  const auto a = sweep_time(c, 5000, 10.0);
  const auto b = sweep_time(c, 5000, 10.0);
  for (std::size_t j = 0; j < a.points.size(); ++j) {
    CHECK(a.points[j].value == b.points[j].value);
    CHECK(std::isfinite(a.points[j].value));
  }
  c.spec.seed = 4;
  const auto d = sweep_time(c, 5000, 10.0);
  CHECK(d.points[7].value != a.points[7].value);
}

TEST_CASE("edge-server sweep ordering across populations") {
  const auto c = noise_free_config();
  const auto series = sweep_edge_servers(c, 10.0);
  REQUIRE(series.size() == 3);
  for (const auto& s : series) CHECK(s.points.size() == 200);
  for (std::size_t i = 0; i < 200; ++i) {
    CHECK(series[2].points[i].value > series[1].points[i].value);
    CHECK(series[1].points[i].value > series[0].points[i].value);
  }
}

TEST_CASE("edge servers are pure cost without the load-balancing term") {
  auto c = noise_free_config();
  c.params.y_instr = 0.0;
  for (const auto& s : sweep_edge_servers(c, 7.0))
    for (std::size_t i = 1; i < s.points.size(); ++i)
      CHECK(s.points[i].value >= s.points[i - 1].value);
}

TEST_CASE("edge-server grid is clipped per population") {
  auto c = noise_free_config();
  c.populations = {50, 5000};
  const auto series = sweep_edge_servers(c, 1.0);
  CHECK(series[0].points.size() == 50);
  CHECK(series[0].points.back().x == 50.0);
  CHECK(series[1].points.size() == 200);
  c.m_min = 60;
  CHECK_THROWS_AS(sweep_edge_servers(c, 1.0), std::invalid_argument);
}

TEST_CASE("replication-averaged sweep converges to the noise-free series") {
  ScenarioConfig c;
  c.populations = {5000};
  c.m_max = 40;
  c.replications = 400;
  const auto noisy = sweep_edge_servers(c, 10.0)[0];
  double worst = 0.0;
  for (const auto& p : noisy.points) {
    REQUIRE(p.stderr_.has_value());
    CHECK(*p.stderr_ > 0.0);
    worst = std::max(worst, std::abs(p.value - det_total(c, 5000, p.x, 10.0)) / *p.stderr_);
  }
  CHECK(worst < 5.0);
}

TEST_CASE("monte carlo estimates") {
  const ScenarioPoint<double> point{5000, 10.0, 5.0};
  const auto c0 = noise_free_config();
  const auto z = monte_carlo_tco(point, c0, 10);
  CHECK(z.mean == doctest::Approx(det_total(c0, 5000, 10.0, 5.0)).epsilon(1e-14));
  CHECK(z.variance == doctest::Approx(0.0).epsilon(1e-6));
  CHECK_THROWS_AS(monte_carlo_tco(point, c0, 1), std::invalid_argument);

  ScenarioConfig c;
  c.spec.seed = 8;
  const auto mean_est = monte_carlo_tco(point, c, 10000);
  CHECK(std::abs(mean_est.mean - det_total(c, 5000, 10.0, 5.0)) <= 4.0 * mean_est.stderr_);

  const auto var_est = monte_carlo_tco(point, c, 100000);
  const double expected = aggregated_noise_variance(point, c.spec, c.params);
  CHECK(std::abs(var_est.variance / expected - 1.0) < 0.05);

  const auto again = monte_carlo_tco(point, c, 10000);
  CHECK(again.mean == mean_est.mean);
}

TEST_CASE("expected argmin matches the deterministic argmin") {
  ScenarioConfig c;
  c.spec.seed = 12;
  std::int64_t best_m = 0;
  double best = 1e300;
  for (std::int64_t m = 1; m <= 91; m += 10) {
    const auto est = monte_carlo_tco(ScenarioPoint<double>{5000, double(m), 10.0}, c, 10000);
    if (est.mean < best) {
      best = est.mean;
      best_m = m;
    }
  }
  CHECK(best_m == grid_search(5000, 10.0, c.params, c.table, 91).m);
}

TEST_CASE("window averages") {
  SeriesResult s;
  for (int t = 0; t <= 50; ++t) s.points.push_back({double(t), double(t % 7), std::nullopt});
  const auto avg = window_averages(s, 5.0, 50.0);
  REQUIRE(avg.points.size() == 10);
  double first = 0.0;
  for (int t = 0; t < 5; ++t) first += t % 7;
  CHECK(avg.points[0].value == doctest::Approx(first / 5.0));
  double last = 0.0;
  for (int t = 45; t <= 50; ++t) last += t % 7;
  CHECK(avg.points[9].value == doctest::Approx(last / 6.0));
  CHECK(avg.points[9].x == 45.0);
  CHECK(window_averages(s, 5.0, 47.0).points.size() == 10);
}

TEST_CASE("noise-free tracking agrees with the grid oracle") {
  const auto c = noise_free_config();
  const auto track = track_optimal_m(c);
  REQUIRE(track.optimum.points.size() == 51);
  CHECK(track.averages.points.size() == 10);
  for (std::size_t j : {0u, 5u, 17u, 33u, 50u}) {
    const double t = track.optimum.points[j].x;
    CHECK(track.optimum.points[j].value == grid_search(5000, t, c.params, c.table, 200).m);
  }
  // Adjacent steps at large t are the same deterministic problem to
  // machine precision.
  CHECK(track.optimum.points[49].value == track.optimum.points[50].value);

  auto warm = c;
  warm.warm_start = true;
  const auto tw = track_optimal_m(warm);
  for (std::size_t j = 0; j < tw.optimum.points.size(); ++j)
    CHECK(tw.optimum.points[j].value == track.optimum.points[j].value);
}

TEST_CASE("warm start recovers from a start the default gains cannot cross") {
  // At t = 0 the slope in m is about 44, and the default gains move the
  // iterate by at most ~0.244 * 44 ~ 11, so a cold start at 20 stalls.
  auto c = noise_free_config();
  c.optimizer.m0 = 20.0;
  const auto cold = track_optimal_m(c);
  CHECK(cold.optimum.points[0].value > 1.0);
  c.warm_start = true;
  const auto warm = track_optimal_m(c);
  CHECK(warm.optimum.points[0].value == cold.optimum.points[0].value);
  for (std::size_t j = 1; j < warm.optimum.points.size(); ++j)
    CHECK(warm.optimum.points[j].value ==
          grid_search(5000, warm.optimum.points[j].x, c.params, c.table, 200).m);
}

TEST_CASE("tracking with growth keeps every optimum feasible") {
  ScenarioConfig c;
  c.spec.seed = 21;
  c.growth.kind = SubscriberGrowth::Kind::Linear;
  c.growth.n0 = 40.0;
  c.growth.rate = 2.0;
  c.optimizer.m0 = 30.0;
  c.warm_start = true;
  const auto track = track_optimal_m(c);
  for (std::size_t j = 0; j < track.optimum.points.size(); ++j) {
    const auto n = track.subscribers[j];
    CHECK(n == c.growth(track.optimum.points[j].x));
    CHECK(track.optimum.points[j].value >= 1.0);
    CHECK(track.optimum.points[j].value <= double(n));
    CHECK(track.continuous[j] >= 1.0);
    CHECK(track.continuous[j] <= double(n));
  }
  const auto again = track_optimal_m(c);
  for (std::size_t j = 0; j < track.continuous.size(); ++j)
    CHECK(again.continuous[j] == track.continuous[j]);
}

TEST_CASE("tracking reports the failing time") {
  auto c = noise_free_config();
  c.table.x_stb = 1e308;  // finite cost, infinite total
  c.params = CostModelParams<double>::defaults(c.table);
  try {
    track_optimal_m(c);
    FAIL("expected a tracking error");
  } catch (const TrackError& e) {
    CHECK(e.t() == 0.0);
  }
}
