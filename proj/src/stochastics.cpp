#include "tco/stochastics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tco {

std::string_view to_string(ResamplePolicy p) {
  return p == ResamplePolicy::PerEvaluation ? "per-evaluation" : "frozen-per-run";
}

std::string_view to_string(ProbePairing p) {
  return p == ProbePairing::Independent ? "independent" : "paired";
}

ResamplePolicy parse_resample_policy(std::string_view s) {
  if (s == "per-evaluation") return ResamplePolicy::PerEvaluation;
  if (s == "frozen-per-run") return ResamplePolicy::FrozenPerRun;
  throw std::invalid_argument("unknown resample policy '" + std::string(s) + "'");
}

ProbePairing parse_probe_pairing(std::string_view s) {
  if (s == "independent") return ProbePairing::Independent;
  if (s == "paired") return ProbePairing::Paired;
  throw std::invalid_argument("unknown probe pairing '" + std::string(s) + "'");
}

PerturbationSpec PerturbationSpec::defaults(const DeviceCostTable<double>& table,
                                            std::uint64_t seed) {
  PerturbationSpec spec;
  for (int i = 0; i < kTermCount; ++i) spec.sd(i) = std::sqrt(table[term_owner(i)]);
  spec.seed = seed;
  return spec;
}

PerturbationSpec PerturbationSpec::noise_free(std::uint64_t seed) {
  PerturbationSpec spec;
  spec.seed = seed;
  return spec;
}

void PerturbationSpec::validate() const {
  for (int i = 0; i < kTermCount; ++i)
    if (!(sd(i) >= 0.0) || !std::isfinite(sd(i)))
      throw std::invalid_argument("noise sd for " + std::string(kTermNames[i]) +
                                  " must be finite and nonnegative");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t stream_index) {
  return splitmix64(master_seed + 0x9E3779B97F4A7C15ULL * (stream_index + 1));
}

std::uint64_t stream_index_of(std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = 0;
  for (auto p : path) h = splitmix64(h ^ p);
  return h;
}

double NormalStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double NormalStream::next() {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  return r * std::cos(theta);
}

PerturbationStream::PerturbationStream(const PerturbationSpec& spec, std::uint64_t stream_index)
    : sd_(spec.sd), normals_(derive_stream_seed(spec.seed, stream_index)) {
  spec.validate();
}

PerturbationVector PerturbationStream::next() {
  PerturbationVector xi;
  for (int i = 0; i < kTermCount; ++i) xi(i) = sd_(i) * normals_.next();
  return xi;
}

PerturbationVector sample_perturbations(const PerturbationSpec& spec, std::uint64_t stream_index) {
  return PerturbationStream(spec, stream_index).next();
}

double aggregated_noise_variance(const ScenarioPoint<double>& point, const PerturbationSpec& spec,
                                 const CostModelParams<double>& params) {
  point.validate();
  spec.validate();
  return term_multipliers(point, params).cwiseProduct(spec.sd).squaredNorm();
}

}  // namespace tco
