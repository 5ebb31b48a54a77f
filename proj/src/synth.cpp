#include "biovit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace biovit::synth {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Gaussian::Gaussian(std::uint64_t seed) : engine_(seed) {}

double Gaussian::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Gaussian::normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  // 1 - uniform() lies in (0, 1], so the log is finite.
  const double radius = std::sqrt(-2.0 * std::log(1.0 - uniform()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

std::string cohort_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "SYN%02zu", index + 1);
  return buf;
}

session::AttentionSession generate(const SynthSpec& spec) {
  if (spec.n_samples < 1) throw Error("synthetic session needs n_samples >= 1");
  if (!(spec.noise_sd >= 0.0) || !std::isfinite(spec.noise_sd)) throw Error("noise_sd must be finite and >= 0");
  const std::size_t want = spec.model == trend::TrendModelKind::SCurve      ? 4
                           : spec.model == trend::TrendModelKind::Quadratic ? 3
                                                                            : 2;
  if (spec.coefficients.size() != want) {
    throw Error(std::string(trend::to_string(spec.model)) + " needs " + std::to_string(want) + " coefficients");
  }
  trend::TrendFit shape;
  shape.kind = spec.model;
  shape.coefficients = spec.coefficients;

  Gaussian rng(spec.seed);
  std::vector<session::AttentionSample> samples;
  samples.reserve(spec.n_samples);
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < spec.n_samples; ++i) {
    const double t = static_cast<double>(i + 1);
    double y = trend::evaluate(shape, t);
    if (!std::isfinite(y)) throw Error("trend is not finite at t=" + std::to_string(i + 1));
    if (spec.noise_sd > 0.0) y += spec.noise_sd * rng.normal();
    if (spec.quantize) y = std::round(y);
    if (spec.clamp && (y < 0.0 || y > 100.0)) {
      y = std::clamp(y, 0.0, 100.0);
      ++clamped;
    }
    if (y < 0.0 || y > 100.0) {
      throw Error("synthetic value " + std::to_string(y) + " at t=" + std::to_string(i + 1) +
                  " leaves [0, 100]; enable clamping");
    }
    samples.push_back({i + 1, static_cast<double>(i), y, std::nullopt, std::nullopt});
  }
  return session::AttentionSession(spec.participant_id, std::move(samples), std::nullopt, clamped);
}

std::vector<session::AttentionSession> generate_cohort(const std::vector<SynthSpec>& specs) {
  std::vector<session::AttentionSession> out;
  out.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto spec = specs[i];
    spec.seed = splitmix64(spec.seed ^ static_cast<std::uint64_t>(i));
    if (spec.participant_id.empty()) spec.participant_id = cohort_id(i);
    out.push_back(generate(spec));
  }
  return out;
}

}  // namespace biovit::synth
