#pragma once

// Trend models for attention series. The regressor t is the 1-based sample
// index.
//
//   Linear             Y_t = b0 + b1*t                 OLS on [1, t]
//   ExponentialGrowth  Y_t = b0 * b1^t                 OLS on log Y
//   Quadratic          Y_t = b0 + b1*t + b2*t^2        OLS on [1, t, t^2]
//   SCurve             Y_t = 10^a / (b0 + b1 * b2^t)   nonlinear LS, a fixed
//
// Internally the regressor is rescaled to u = t/N so that t^2 at N ~ 1e5 does
// not wreck the conditioning; reported coefficients are always in t units.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "biovit/session.hpp"

namespace biovit::trend {

enum class TrendModelKind { Linear, ExponentialGrowth, Quadratic, SCurve };

inline constexpr TrendModelKind kAllModels[] = {TrendModelKind::Linear, TrendModelKind::ExponentialGrowth,
                                                TrendModelKind::Quadratic, TrendModelKind::SCurve};

std::string_view to_string(TrendModelKind kind);
std::optional<TrendModelKind> parse_model_kind(std::string_view name);

struct AccuracyMeasures {
  double mape = 0.0;  // percent; NaN when every actual value is zero
  double mad = 0.0;
  double msd = 0.0;
};

struct TrendFit {
  TrendModelKind kind = TrendModelKind::Linear;
  // Linear (b0, b1); ExponentialGrowth (b0, b1); Quadratic (b0, b1, b2);
  // SCurve (b0, b1, b2, a).
  std::vector<double> coefficients;
  std::vector<double> fitted;
  AccuracyMeasures accuracy;
  double series_mean = 0.0;
  int iterations = 0;  // solver iterations, SCurve only
};

// MAPE skips zero actuals; MAD and MSD use every point. Throws when lengths
// differ, the input is empty, or every actual value is zero.
AccuracyMeasures accuracy(std::span<const double> actual, std::span<const double> fitted);

TrendFit fit_linear(std::span<const double> series);
TrendFit fit_quadratic(std::span<const double> series);
TrendFit fit_exponential(std::span<const double> series);

struct SCurveOptions {
  int max_iterations = 200;
  double relative_tolerance = 1e-10;
};
TrendFit fit_scurve(std::span<const double> series, const SCurveOptions& options = {});

TrendFit fit(TrendModelKind kind, std::span<const double> series);

inline TrendFit fit_linear(const session::AttentionSession& s) { return fit_linear(s.attention_values()); }
inline TrendFit fit_quadratic(const session::AttentionSession& s) { return fit_quadratic(s.attention_values()); }
inline TrendFit fit_exponential(const session::AttentionSession& s) { return fit_exponential(s.attention_values()); }
inline TrendFit fit_scurve(const session::AttentionSession& s) { return fit_scurve(s.attention_values()); }

// Value of a fitted model at regressor t.
double evaluate(const TrendFit& fit, double t);

struct SkippedModel {
  TrendModelKind kind;
  std::string reason;
};

struct ModelSelection {
  TrendModelKind best;
  std::vector<TrendFit> fits;  // in the order attempted
  std::vector<SkippedModel> skipped;

  const TrendFit& best_fit() const;
  const TrendFit* find(TrendModelKind kind) const;
};

// Lowest MAPE wins; MAD then MSD break ties, then the simpler model. Values
// within 1e-9 (relative, with a 1e-9 absolute floor) count as tied.
ModelSelection select_model(std::span<const double> series, std::span<const TrendModelKind> models = kAllModels);

enum class QuadraticShape { MonotoneIncreasing, MonotoneDecreasing, ConcaveDown, ConcaveUp, Degenerate };

std::string_view to_string(QuadraticShape shape);

// Sign table on (b1, b2). A coefficient below 1e-12 * |series mean| in
// magnitude makes the shape Degenerate.
QuadraticShape classify_shape(const TrendFit& fit);

// Renders "Yt = 89.376 - 0.000305 × t + 0.000000 × t²" style equations with
// the given number of decimals for the constant and for the slope terms.
std::string format_equation(const TrendFit& fit, int constant_decimals = 3, int slope_decimals = 6);
// Same equation with every coefficient at full round-trip precision.
std::string format_equation_full(const TrendFit& fit);

}  // namespace biovit::trend
