#pragma once

#include "tco/cost_model.hpp"

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <string_view>

namespace tco {

using PerturbationVector = TermVector<double>;

enum class ResamplePolicy { PerEvaluation, FrozenPerRun };
/// Whether the two probes of one finite-difference step share a draw.
enum class ProbePairing { Independent, Paired };

std::string_view to_string(ResamplePolicy p);
std::string_view to_string(ProbePairing p);
ResamplePolicy parse_resample_policy(std::string_view s);
ProbePairing parse_probe_pairing(std::string_view s);

/// Gaussian perturbation model: one zero-mean term per cost term, with its
/// own standard deviation, plus the seeding policy.
struct PerturbationSpec {
  PerturbationVector sd = PerturbationVector::Zero();
  std::uint64_t seed = 0;
  ResamplePolicy resample = ResamplePolicy::PerEvaluation;
  ProbePairing pairing = ProbePairing::Independent;

  /// sd of every term equals the square root of its owner's initial cost.
  static PerturbationSpec defaults(const DeviceCostTable<double>& table, std::uint64_t seed = 0);
  /// All standard deviations zero.
  static PerturbationSpec noise_free(std::uint64_t seed = 0);

  bool is_noise_free() const { return (sd.array() == 0.0).all(); }
  void validate() const;
};

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of stream `stream_index` under `master_seed`:
///   splitmix64(master_seed + 0x9E3779B97F4A7C15 * (stream_index + 1)).
std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t stream_index);

/// Combines a multi-level task id (e.g. series, point, replication) into a
/// single stream index by chained splitmix64.
std::uint64_t stream_index_of(std::initializer_list<std::uint64_t> path);

/// Standard normal variates from std::mt19937_64 via Box-Muller.
///
/// Uniforms take the top 53 bits of a 64-bit draw, u = (bits >> 11) * 2^-53.
/// Each pair (u1, u2) yields r cos(2 pi u2) then r sin(2 pi u2) with
/// r = sqrt(-2 ln(1 - u1)). mt19937_64 is fully specified by the standard,
/// so sequences depend only on the seed and libm.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double next();
  double uniform();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// A reproducible sequence of perturbation vectors for one stream.
class PerturbationStream {
 public:
  PerturbationStream(const PerturbationSpec& spec, std::uint64_t stream_index);

  PerturbationVector next();

 private:
  PerturbationVector sd_;
  NormalStream normals_;
};

/// First vector of the given stream.
PerturbationVector sample_perturbations(const PerturbationSpec& spec, std::uint64_t stream_index);

/// Closed-form variance of the TCO total under the spec: the total is
/// affine in the perturbations, so Var = sum_i (w_i sd_i)^2.
double aggregated_noise_variance(const ScenarioPoint<double>& point, const PerturbationSpec& spec,
                                 const CostModelParams<double>& params);

}  // namespace tco
