#include "tco/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tco {

GainSchedule::GainSchedule(double a, double c, double A, double alpha, double gamma)
    : a_(a), c_(c), A_(A), alpha_(alpha), gamma_(gamma) {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string("gain schedule: ") + name + " must be positive");
  };
  positive(a, "a");
  positive(c, "c");
  positive(alpha, "alpha");
  positive(gamma, "gamma");
  if (!(A >= 0.0) || !std::isfinite(A))
    throw std::invalid_argument("gain schedule: A must be nonnegative");
}

double gain_a(std::int64_t k, const GainSchedule& s) {
  if (k < 0) throw std::invalid_argument("gain index must be nonnegative");
  return s.a() / std::pow(static_cast<double>(k) + 1.0 + s.A(), s.alpha());
}

double gain_c(std::int64_t k, const GainSchedule& s) {
  if (k < 0) throw std::invalid_argument("gain index must be nonnegative");
  return s.c() / std::pow(static_cast<double>(k) + 1.0, s.gamma());
}

Bounds::Bounds(double lo, double hi) : lower(lo), upper(hi) {
  if (!(lo <= hi)) throw std::invalid_argument("bounds: lower exceeds upper");
}

double Bounds::project(double m) const { return std::clamp(m, lower, upper); }

GradientEstimate fdsa_gradient(const Objective& f, double m, double c_k, const Bounds& bounds) {
  if (!(c_k > 0.0)) throw std::invalid_argument("fdsa_gradient: c_k must be positive");
  GradientEstimate est;
  est.m_plus = bounds.project(m + c_k);
  est.m_minus = bounds.project(m - c_k);
  est.f_plus = f(est.m_plus);
  est.f_minus = f(est.m_minus);
  // divide by the spacing actually probed, not the nominal 2 c_k
  const double spacing = est.m_plus - est.m_minus;
  est.g = spacing > 0.0 ? (est.f_plus - est.f_minus) / spacing : 0.0;
  return est;
}

double projected_update(double m, double a_k, double g, const Bounds& bounds) {
  return bounds.project(m - a_k * g);
}

FdsaState fdsa_step(const FdsaState& state, const Objective& f, const GainSchedule& schedule,
                    const Bounds& bounds, FdsaTrajectory& trajectory) {
  const double a_k = gain_a(state.k, schedule);
  const double c_k = gain_c(state.k, schedule);
  const GradientEstimate est = fdsa_gradient(f, state.m_hat, c_k, bounds);
  trajectory.records.push_back({state.k, state.m_hat, est.g, a_k, c_k, est.m_plus, est.m_minus,
                                est.f_plus, est.f_minus});
  return {state.k + 1, projected_update(state.m_hat, a_k, est.g, bounds)};
}

void OptimizeOptions::validate() const {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (!(tolerance >= 0.0)) throw std::invalid_argument("tolerance must be nonnegative");
  if (patience < 1) throw std::invalid_argument("patience must be at least 1");
  if (!std::isfinite(m0)) throw std::invalid_argument("m0 must be finite");
}

std::int64_t integer_recommendation(double m, const Bounds& bounds) {
  const double lo = std::ceil(bounds.lower);
  const double hi = std::floor(bounds.upper);
  return static_cast<std::int64_t>(std::clamp(std::floor(m + 0.5), lo, hi));
}

FdsaTrajectory optimize(const Objective& f, const Bounds& bounds, const GainSchedule& schedule,
                        const OptimizeOptions& options) {
  options.validate();
  if (!bounds.contains(options.m0))
    throw std::domain_error("optimize: m0 lies outside the feasible interval");

  FdsaTrajectory trajectory;
  trajectory.records.reserve(static_cast<std::size_t>(options.max_iters));
  FdsaState state{0, options.m0};
  std::int64_t quiet = 0;
  for (std::int64_t i = 0; i < options.max_iters; ++i) {
    const FdsaState next = fdsa_step(state, f, schedule, bounds, trajectory);
    quiet = std::abs(next.m_hat - state.m_hat) < options.tolerance ? quiet + 1 : 0;
    state = next;
    if (options.early_stop && quiet >= options.patience) {
      trajectory.stopped_early = true;
      break;
    }
  }
  trajectory.final_m = state.m_hat;
  trajectory.recommendation = integer_recommendation(state.m_hat, bounds);
  return trajectory;
}

FdsaTrajectory optimize(const ScenarioPoint<double>& point_template,
                        const CostModelParams<double>& params, const DeviceCostTable<double>& table,
                        const PerturbationSpec& spec, const GainSchedule& schedule,
                        const OptimizeOptions& options, std::uint64_t stream_index) {
  ScenarioPoint<double> point = point_template;
  point.m = 1.0;
  point.validate();
  table.validate();
  params.validate(table);
  spec.validate();
  const Bounds bounds(1.0, static_cast<double>(point.n));
  if (!bounds.contains(options.m0))
    throw std::domain_error("optimize: m0 must satisfy 1 <= m0 <= n");

  PerturbationStream stream(spec, stream_index);
  const bool noise_free = spec.is_noise_free();
  PerturbationVector xi = PerturbationVector::Zero();
  if (!noise_free && spec.resample == ResamplePolicy::FrozenPerRun) xi = stream.next();

  std::uint64_t evaluations = 0;
  const Objective objective = [&](double m) {
    if (!noise_free && spec.resample == ResamplePolicy::PerEvaluation) {
      // fdsa_gradient evaluates in (plus, minus) pairs; paired probes reuse
      // the draw taken for the plus probe.
      if (spec.pairing == ProbePairing::Independent || evaluations % 2 == 0) xi = stream.next();
    }
    ++evaluations;
    ScenarioPoint<double> probe = point;
    probe.m = m;
    const double total = tco(probe, params, table, xi).total;
    if (!std::isfinite(total))
      throw std::runtime_error("non-finite objective at m=" + std::to_string(m));
    return total;
  };
  return optimize(objective, bounds, schedule, options);
}

GridOptimum grid_search(std::int64_t n, double t, const CostModelParams<double>& params,
                        const DeviceCostTable<double>& table, std::int64_t m_max) {
  if (m_max < 1) throw std::invalid_argument("grid_search: empty range");
  if (m_max > n) throw std::invalid_argument("grid_search: m_max exceeds n");
  GridOptimum best{0, std::numeric_limits<double>::infinity()};
  for (std::int64_t m = 1; m <= m_max; ++m) {
    const double value =
        deterministic_tco(ScenarioPoint<double>{n, static_cast<double>(m), t}, params, table).total;
    if (value < best.tco) best = {m, value};
  }
  return best;
}

}  // namespace tco
