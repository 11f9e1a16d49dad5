#pragma once

#include "tco/cost_model.hpp"
#include "tco/optimizer.hpp"
#include "tco/stochastics.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tco {

/// Subscriber count as a function of time.
struct SubscriberGrowth {
  enum class Kind { Constant, Linear, Logistic };

  Kind kind = Kind::Constant;
  double n0 = 5000.0;
  double rate = 0.0;      // subscribers/year (linear) or 1/year (logistic)
  double capacity = 0.0;  // logistic ceiling

  std::int64_t operator()(double t) const;
  void validate(double horizon) const;
};

std::string_view to_string(SubscriberGrowth::Kind k);
SubscriberGrowth::Kind parse_growth_kind(std::string_view s);

struct ScenarioConfig {
  DeviceCostTable<double> table{};
  CostModelParams<double> params = CostModelParams<double>::defaults(DeviceCostTable<double>{});
  PerturbationSpec spec = PerturbationSpec::defaults(DeviceCostTable<double>{});
  GainSchedule schedule{};
  OptimizeOptions optimizer{};

  double horizon_years = 50.0;
  double time_step = 1.0;
  double average_window = 5.0;
  std::vector<std::int64_t> populations{5000, 10000, 50000};
  std::int64_t m_min = 1;
  std::int64_t m_max = 200;
  SubscriberGrowth growth{};
  bool warm_start = false;
  /// 1 = single noisy draw per series point; more = replication mean + stderr.
  std::int64_t replications = 1;

  void validate() const;
  /// t = 0, step, 2 step, ... up to and including the horizon.
  std::vector<double> time_grid() const;
};

struct SeriesPoint {
  double x = 0.0;
  double value = 0.0;
  std::optional<double> stderr_;
};

struct SeriesResult {
  std::string name;
  std::string x_label;
  std::string value_label;
  std::vector<SeriesPoint> points;
  std::uint64_t seed = 0;
  std::string config_digest;
};

struct MonteCarloEstimate {
  double mean = 0.0;
  double variance = 0.0;
  double stderr_ = 0.0;
};

/// Sample mean/variance of the TCO total over `replications` draws, one
/// stream per replication.
MonteCarloEstimate monte_carlo_tco(const ScenarioPoint<double>& point, const ScenarioConfig& config,
                                   std::int64_t replications);
inline MonteCarloEstimate monte_carlo_tco(const ScenarioPoint<double>& point,
                                          const ScenarioConfig& config) {
  return monte_carlo_tco(point, config, config.replications);
}

/// TCO over the time grid at fixed (n, m).
SeriesResult sweep_time(const ScenarioConfig& config, std::int64_t n, double m);

/// TCO over the edge-server grid [m_min, m_max] at fixed t, one series per
/// population; the grid is clipped to [1, n] per population.
std::vector<SeriesResult> sweep_edge_servers(const ScenarioConfig& config, double t);

struct TrackResult {
  SeriesResult optimum;   // integer recommendation per time step
  SeriesResult averages;  // mean recommendation per averaging window
  std::vector<std::int64_t> subscribers;
  std::vector<double> continuous;  // final FDSA iterate per time step
};

class TrackError : public std::runtime_error {
 public:
  TrackError(double t, const std::string& what)
      : std::runtime_error("optimizer failed at t=" + std::to_string(t) + ": " + what), t_(t) {}
  double t() const { return t_; }

 private:
  double t_;
};

/// Runs FDSA at every time step with n = growth(t), optionally warm-started
/// from the previous step's final iterate.
TrackResult track_optimal_m(const ScenarioConfig& config);

/// Arithmetic means of `per_step` over windows [w W, (w + 1) W); the last
/// window is closed at the horizon. Yields ceil(horizon / W) entries.
SeriesResult window_averages(const SeriesResult& per_step, double window, double horizon);

}  // namespace tco
