#pragma once

#include "tco/cost_model.hpp"
#include "tco/stochastics.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace tco {

/// Step-size and probe-spacing sequences
///   a_k = a / (k + 1 + A)^alpha,   c_k = c / (k + 1)^gamma.
/// Defaults are a = 10, c = 1, A = 4, alpha = 3, gamma = 2.
class GainSchedule {
 public:
  GainSchedule() = default;
  GainSchedule(double a, double c, double A, double alpha, double gamma);

  double a() const { return a_; }
  double c() const { return c_; }
  double A() const { return A_; }
  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }

 private:
  double a_ = 10.0;
  double c_ = 1.0;
  double A_ = 4.0;
  double alpha_ = 3.0;
  double gamma_ = 2.0;
};

double gain_a(std::int64_t k, const GainSchedule& schedule);
double gain_c(std::int64_t k, const GainSchedule& schedule);

struct Bounds {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  Bounds() = default;
  Bounds(double lo, double hi);

  double project(double m) const;
  bool contains(double m) const { return m >= lower && m <= upper; }
};

using Objective = std::function<double(double)>;

struct GradientEstimate {
  double g = 0.0;
  double m_plus = 0.0, m_minus = 0.0;  // probe points actually evaluated
  double f_plus = 0.0, f_minus = 0.0;
};

/// Two-sided divided difference around m with half-width c_k. Probes are
/// clipped into `bounds`; when clipping happens the realized spacing
/// m_plus - m_minus replaces 2 c_k. Evaluates f(m_plus) before f(m_minus).
GradientEstimate fdsa_gradient(const Objective& f, double m, double c_k, const Bounds& bounds = {});

struct FdsaRecord {
  std::int64_t k = 0;
  double m_hat = 0.0;  // iterate the gradient was taken at
  double g_hat = 0.0;
  double a_k = 0.0;
  double c_k = 0.0;
  double m_plus = 0.0, m_minus = 0.0;
  double probe_plus = 0.0, probe_minus = 0.0;
};

struct FdsaTrajectory {
  std::vector<FdsaRecord> records;
  double final_m = 0.0;
  std::int64_t recommendation = 0;
  bool stopped_early = false;
};

struct FdsaState {
  std::int64_t k = 0;
  double m_hat = 0.0;
};

/// m' = project(m - a_k g).
double projected_update(double m, double a_k, double g, const Bounds& bounds);

/// One recursion step; appends the step's record to `trajectory`.
FdsaState fdsa_step(const FdsaState& state, const Objective& f, const GainSchedule& schedule,
                    const Bounds& bounds, FdsaTrajectory& trajectory);

struct OptimizeOptions {
  double m0 = 1.0;
  std::int64_t max_iters = 500;
  double tolerance = 1e-3;   // early stop when |m_{k+1} - m_k| stays below this
  std::int64_t patience = 10;  // for this many consecutive steps
  bool early_stop = true;

  void validate() const;
};

/// Round-half-up onto the integers of [lower, upper].
std::int64_t integer_recommendation(double m, const Bounds& bounds);

/// Generic projected FDSA loop.
FdsaTrajectory optimize(const Objective& f, const Bounds& bounds, const GainSchedule& schedule,
                        const OptimizeOptions& options);

/// Projected FDSA on the TCO at fixed (n, t) over m in [1, n]. The objective
/// draws perturbations from stream `stream_index` of `spec` per its resample
/// policy; with paired probes both probes of one step share a draw.
FdsaTrajectory optimize(const ScenarioPoint<double>& point_template,
                        const CostModelParams<double>& params, const DeviceCostTable<double>& table,
                        const PerturbationSpec& spec, const GainSchedule& schedule,
                        const OptimizeOptions& options, std::uint64_t stream_index = 0);

struct GridOptimum {
  std::int64_t m = 0;
  double tco = 0.0;
};

/// Exhaustive search of the noise-free TCO over integers m in [1, m_max];
/// ties resolve to the smaller m.
GridOptimum grid_search(std::int64_t n, double t, const CostModelParams<double>& params,
                        const DeviceCostTable<double>& table, std::int64_t m_max);

}  // namespace tco
