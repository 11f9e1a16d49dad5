#include "tco/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace tco {

namespace {

constexpr std::uint64_t kTimeSweepTag = 1;
constexpr std::uint64_t kServerSweepTag = 2;
constexpr std::uint64_t kTrackTag = 3;
constexpr std::uint64_t kMonteCarloTag = 4;

// Runs body(i) for i in [0, count) on a few threads. Callers write to
// disjoint slots so the result does not depend on scheduling.
template <typename Body>
void parallel_for(std::size_t count, Body body) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), 8);
  if (count < 4096 || workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([=] {
      for (std::size_t i = begin; i < end; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

// Two-pass sample moments, summed in index order.
Moments sample_moments(const std::vector<double>& values) {
  Moments out;
  const double count = static_cast<double>(values.size());
  for (double v : values) out.mean += v;
  out.mean /= count;
  if (values.size() > 1) {
    for (double v : values) out.variance += (v - out.mean) * (v - out.mean);
    out.variance /= count - 1.0;
  }
  return out;
}

// One series point: a single draw, or a replication mean with stderr.
SeriesPoint evaluate_point(const ScenarioConfig& config, const ScenarioPoint<double>& point,
                           double x, std::uint64_t tag, std::uint64_t series,
                           std::uint64_t index) {
  if (config.spec.is_noise_free())
    return {x, deterministic_tco(point, config.params, config.table).total, std::nullopt};
  if (config.replications <= 1) {
    const auto xi = sample_perturbations(config.spec, stream_index_of({tag, series, index, 0}));
    return {x, tco(point, config.params, config.table, xi).total, std::nullopt};
  }
  std::vector<double> values(static_cast<std::size_t>(config.replications));
  for (std::size_t r = 0; r < values.size(); ++r) {
    const auto xi = sample_perturbations(config.spec, stream_index_of({tag, series, index, r}));
    values[r] = tco(point, config.params, config.table, xi).total;
  }
  const Moments mom = sample_moments(values);
  return {x, mom.mean, std::sqrt(mom.variance / static_cast<double>(values.size()))};
}

}  // namespace

std::string_view to_string(SubscriberGrowth::Kind k) {
  switch (k) {
    case SubscriberGrowth::Kind::Constant: return "constant";
    case SubscriberGrowth::Kind::Linear: return "linear";
    case SubscriberGrowth::Kind::Logistic: return "logistic";
  }
  return "constant";
}

SubscriberGrowth::Kind parse_growth_kind(std::string_view s) {
  if (s == "constant") return SubscriberGrowth::Kind::Constant;
  if (s == "linear") return SubscriberGrowth::Kind::Linear;
  if (s == "logistic") return SubscriberGrowth::Kind::Logistic;
  throw std::invalid_argument("unknown growth kind '" + std::string(s) + "'");
}

std::int64_t SubscriberGrowth::operator()(double t) const {
  double n = n0;
  switch (kind) {
    case Kind::Constant: break;
    case Kind::Linear: n = n0 + rate * t; break;
    case Kind::Logistic: n = capacity / (1.0 + (capacity / n0 - 1.0) * std::exp(-rate * t)); break;
  }
  return static_cast<std::int64_t>(std::llround(n));
}

void SubscriberGrowth::validate(double horizon) const {
  if (!(n0 >= 1.0)) throw std::invalid_argument("growth: n0 must be at least 1");
  if (kind == Kind::Logistic && !(capacity >= n0))
    throw std::invalid_argument("growth: logistic capacity must be at least n0");
  // Linear is the only preset that can fall below 1, and only at an end.
  if ((*this)(0.0) < 1 || (*this)(horizon) < 1)
    throw std::invalid_argument("growth: subscriber count drops below 1 within the horizon");
}

void ScenarioConfig::validate() const {
  table.validate();
  params.validate(table);
  spec.validate();
  optimizer.validate();
  if (!(horizon_years > 0.0)) throw std::invalid_argument("horizon_years must be positive");
  if (!(time_step > 0.0)) throw std::invalid_argument("time_step must be positive");
  if (!(average_window > 0.0)) throw std::invalid_argument("average_window must be positive");
  if (time_step > average_window)
    throw std::invalid_argument("time_step must not exceed average_window");
  if (populations.empty()) throw std::invalid_argument("populations must not be empty");
  for (auto n : populations)
    if (n < 1) throw std::invalid_argument("every population must be at least 1");
  if (m_min < 1 || m_max < m_min) throw std::invalid_argument("m grid is empty");
  if (replications < 1) throw std::invalid_argument("replications must be at least 1");
  growth.validate(horizon_years);
}

std::vector<double> ScenarioConfig::time_grid() const {
  const auto steps = static_cast<std::int64_t>(std::floor(horizon_years / time_step + 1e-9));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps + 1));
  for (std::int64_t j = 0; j <= steps; ++j) grid.push_back(static_cast<double>(j) * time_step);
  return grid;
}

MonteCarloEstimate monte_carlo_tco(const ScenarioPoint<double>& point, const ScenarioConfig& config,
                                   std::int64_t replications) {
  if (replications < 2) throw std::invalid_argument("monte_carlo_tco needs at least 2 replications");
  point.validate();
  config.spec.validate();
  config.params.validate(config.table);
  std::vector<double> values(static_cast<std::size_t>(replications));
  parallel_for(values.size(), [&](std::size_t r) {
    const auto xi = sample_perturbations(config.spec, stream_index_of({kMonteCarloTag, r}));
    values[r] = tco(point, config.params, config.table, xi).total;
  });
  const Moments mom = sample_moments(values);
  return {mom.mean, mom.variance, std::sqrt(mom.variance / static_cast<double>(replications))};
}

SeriesResult sweep_time(const ScenarioConfig& config, std::int64_t n, double m) {
  config.validate();
  ScenarioPoint<double> point{n, m, 0.0};
  point.validate();
  SeriesResult out;
  out.name = "time_n" + std::to_string(n);
  out.x_label = "t";
  out.value_label = "tco";
  out.seed = config.spec.seed;
  const auto grid = config.time_grid();
  out.points.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t j) {
    ScenarioPoint<double> p = point;
    p.t = grid[j];
    out.points[j] = evaluate_point(config, p, grid[j], kTimeSweepTag,
                                   static_cast<std::uint64_t>(n), j);
  });
  return out;
}

std::vector<SeriesResult> sweep_edge_servers(const ScenarioConfig& config, double t) {
  config.validate();
  if (!(t >= 0.0)) throw std::domain_error("sweep_edge_servers: t must be nonnegative");
  std::vector<SeriesResult> all;
  for (auto n : config.populations) {
    const std::int64_t hi = std::min(config.m_max, n);
    if (config.m_min > hi) throw std::invalid_argument("m grid is empty for population " +
                                                       std::to_string(n));
    SeriesResult out;
    out.name = "servers_n" + std::to_string(n);
    out.x_label = "m";
    out.value_label = "tco";
    out.seed = config.spec.seed;
    out.points.resize(static_cast<std::size_t>(hi - config.m_min + 1));
    parallel_for(out.points.size(), [&](std::size_t i) {
      const auto m = static_cast<double>(config.m_min + static_cast<std::int64_t>(i));
      out.points[i] = evaluate_point(config, ScenarioPoint<double>{n, m, t}, m, kServerSweepTag,
                                     static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(m));
    });
    all.push_back(std::move(out));
  }
  return all;
}

SeriesResult window_averages(const SeriesResult& per_step, double window, double horizon) {
  if (!(window > 0.0) || !(horizon > 0.0))
    throw std::invalid_argument("window_averages: window and horizon must be positive");
  const auto count = static_cast<std::size_t>(std::ceil(horizon / window - 1e-9));
  std::vector<double> sums(count, 0.0);
  std::vector<std::size_t> counts(count, 0);
  for (const auto& p : per_step.points) {
    const auto w = std::min(count - 1, static_cast<std::size_t>(std::floor(p.x / window + 1e-9)));
    sums[w] += p.value;
    ++counts[w];
  }
  SeriesResult out;
  out.name = per_step.name + "_averages";
  out.x_label = "window_start";
  out.value_label = "mean_" + per_step.value_label;
  out.seed = per_step.seed;
  out.config_digest = per_step.config_digest;
  for (std::size_t w = 0; w < count; ++w) {
    if (counts[w] == 0)
      throw std::invalid_argument("window_averages: window without samples");
    out.points.push_back({static_cast<double>(w) * window,
                          sums[w] / static_cast<double>(counts[w]), std::nullopt});
  }
  return out;
}

TrackResult track_optimal_m(const ScenarioConfig& config) {
  config.validate();
  TrackResult out;
  out.optimum.name = "track";
  out.optimum.x_label = "t";
  out.optimum.value_label = "m_opt";
  out.optimum.seed = config.spec.seed;

  const auto grid = config.time_grid();
  double previous = config.optimizer.m0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double t = grid[j];
    try {
      const std::int64_t n = config.growth(t);
      OptimizeOptions options = config.optimizer;
      const double start = (config.warm_start && j > 0) ? previous : config.optimizer.m0;
      options.m0 = std::clamp(start, 1.0, static_cast<double>(n));
      const auto traj = optimize(ScenarioPoint<double>{n, 1.0, t}, config.params, config.table,
                                 config.spec, config.schedule, options,
                                 stream_index_of({kTrackTag, j}));
      previous = traj.final_m;
      out.optimum.points.push_back({t, static_cast<double>(traj.recommendation), std::nullopt});
      out.subscribers.push_back(n);
      out.continuous.push_back(traj.final_m);
    } catch (const std::exception& e) {
      throw TrackError(t, e.what());
    }
  }
  out.averages = window_averages(out.optimum, config.average_window, config.horizon_years);
  return out;
}

}  // namespace tco
