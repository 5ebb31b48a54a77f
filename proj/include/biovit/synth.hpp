#pragma once

// Deterministic synthetic attention sessions.
//
// Bits come from std::mt19937_64, whose output sequence is fixed by the C++
// standard. Uniforms take the top 53 bits; Gaussians use the Box-Muller
// transform and consume draws in (cos, sin) pairs. Cohort members get the seed
// splitmix64(seed ^ index). Together these make fixtures reproducible on any
// conforming toolchain.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "biovit/session.hpp"
#include "biovit/trend.hpp"

namespace biovit::synth {

struct SynthSpec {
  std::string participant_id;  // empty: derived from the cohort position
  std::size_t n_samples = 1;
  trend::TrendModelKind model = trend::TrendModelKind::Quadratic;
  // Same layout as TrendFit::coefficients for the chosen model.
  std::vector<double> coefficients{50.0, 0.0, 0.0};
  double noise_sd = 0.0;
  bool clamp = false;     // clip into [0, 100]
  bool quantize = false;  // round to whole eSense units
  std::uint64_t seed = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Seeded source of uniforms and standard normals.
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed);
  double uniform();  // [0, 1)
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

// Y_t = trend(t) + N(0, noise_sd^2), t = 1..n, one sample per second.
// Unclamped values outside [0, 100] and non-finite trend values throw.
session::AttentionSession generate(const SynthSpec& spec);

std::vector<session::AttentionSession> generate_cohort(const std::vector<SynthSpec>& specs);

std::string cohort_id(std::size_t index);

}  // namespace biovit::synth
