#include "biovit/trend.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <cmath>
#include <limits>
#include <numeric>

#include "least_squares.hpp"

namespace biovit::trend {

std::string_view to_string(TrendModelKind kind) {
  switch (kind) {
    case TrendModelKind::Linear: return "Linear";
    case TrendModelKind::ExponentialGrowth: return "ExponentialGrowth";
    case TrendModelKind::Quadratic: return "Quadratic";
    case TrendModelKind::SCurve: return "SCurve";
  }
  return "?";
}

std::optional<TrendModelKind> parse_model_kind(std::string_view name) {
  std::string lower(name);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "linear") return TrendModelKind::Linear;
  if (lower == "exponential" || lower == "exponentialgrowth" || lower == "exp") return TrendModelKind::ExponentialGrowth;
  if (lower == "quadratic") return TrendModelKind::Quadratic;
  if (lower == "scurve" || lower == "s-curve" || lower == "logistic") return TrendModelKind::SCurve;
  return std::nullopt;
}

std::string_view to_string(QuadraticShape shape) {
  switch (shape) {
    case QuadraticShape::MonotoneIncreasing: return "MonotoneIncreasing";
    case QuadraticShape::MonotoneDecreasing: return "MonotoneDecreasing";
    case QuadraticShape::ConcaveDown: return "ConcaveDown";
    case QuadraticShape::ConcaveUp: return "ConcaveUp";
    case QuadraticShape::Degenerate: return "Degenerate";
  }
  return "?";
}

namespace {

AccuracyMeasures measure(std::span<const double> actual, std::span<const double> fitted) {
  double ape = 0.0;
  std::size_t nonzero = 0;
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double e = actual[i] - fitted[i];
    abs_sum += std::abs(e);
    sq_sum += e * e;
    if (actual[i] != 0.0) {
      ape += std::abs(e) / std::abs(actual[i]);
      ++nonzero;
    }
  }
  const auto n = static_cast<double>(actual.size());
  AccuracyMeasures m;
  m.mape = nonzero == 0 ? std::numeric_limits<double>::quiet_NaN() : 100.0 * ape / static_cast<double>(nonzero);
  m.mad = abs_sum / n;
  m.msd = sq_sum / n;
  return m;
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void require_finite(std::span<const double> series) {
  for (double v : series) {
    if (!std::isfinite(v)) throw Error("series contains a non-finite value");
  }
}

// Columns 1, u, u^2, ... with u = t/N, t = 1..N.
std::vector<std::vector<double>> scaled_polynomial_design(std::size_t n, std::size_t degree) {
  std::vector<std::vector<double>> cols(degree + 1, std::vector<double>(n));
  const auto nd = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = static_cast<double>(i + 1) / nd;
    double p = 1.0;
    for (std::size_t d = 0; d <= degree; ++d) {
      cols[d][i] = p;
      p *= u;
    }
  }
  return cols;
}

TrendFit finish(TrendModelKind kind, std::vector<double> coefficients, std::vector<double> fitted,
                std::span<const double> series) {
  for (double c : coefficients) {
    if (!std::isfinite(c)) throw Error(std::string(to_string(kind)) + " fit produced non-finite coefficients");
  }
  TrendFit f;
  f.kind = kind;
  f.coefficients = std::move(coefficients);
  f.fitted = std::move(fitted);
  f.accuracy = measure(series, f.fitted);
  f.series_mean = mean_of(series);
  return f;
}

TrendFit fit_polynomial(TrendModelKind kind, std::span<const double> series, std::size_t degree) {
  const std::size_t n = series.size();
  if (n < degree + 1) {
    throw Error(std::string(to_string(kind)) + " fit needs at least " + std::to_string(degree + 1) + " samples");
  }
  require_finite(series);
  const double level = mean_of(series);
  std::vector<double> centered(series.begin(), series.end());
  for (double& v : centered) v -= level;
  auto scaled = detail::solve_least_squares(scaled_polynomial_design(n, degree), centered);
  if (!scaled) throw Error(std::string(to_string(kind)) + " design matrix is rank deficient");
  // Terms at round-off level relative to the series are numerically zero;
  // pin them so that renderings do not show noise signs.
  double largest = std::abs(level);
  for (double c : *scaled) largest = std::max(largest, std::abs(c));
  for (double& c : *scaled) {
    if (std::abs(c) <= 1e-12 * largest) c = 0.0;
  }
  (*scaled)[0] += level;

  const auto nd = static_cast<double>(n);
  std::vector<double> fitted(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = static_cast<double>(i + 1) / nd;
    double acc = 0.0;
    for (std::size_t d = degree + 1; d-- > 0;) acc = acc * u + (*scaled)[d];
    fitted[i] = acc;
  }
  std::vector<double> beta(degree + 1);
  double scale = 1.0;
  for (std::size_t d = 0; d <= degree; ++d) {
    beta[d] = (*scaled)[d] / scale;
    scale *= nd;
  }
  return finish(kind, std::move(beta), std::move(fitted), series);
}

}  // namespace

AccuracyMeasures accuracy(std::span<const double> actual, std::span<const double> fitted) {
  if (actual.empty() || actual.size() != fitted.size()) {
    throw Error("accuracy needs equal, nonzero lengths");
  }
  const auto m = measure(actual, fitted);
  if (std::isnan(m.mape)) throw Error("MAPE undefined: every actual value is zero");
  return m;
}

TrendFit fit_linear(std::span<const double> series) {
  return fit_polynomial(TrendModelKind::Linear, series, 1);
}

TrendFit fit_quadratic(std::span<const double> series) {
  return fit_polynomial(TrendModelKind::Quadratic, series, 2);
}

TrendFit fit_exponential(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 2) throw Error("ExponentialGrowth fit needs at least 2 samples");
  require_finite(series);
  std::vector<double> logs(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(series[i] > 0.0)) throw Error("ExponentialGrowth fit needs strictly positive values");
    logs[i] = std::log(series[i]);
  }
  auto c = detail::solve_least_squares(scaled_polynomial_design(n, 1), logs);
  if (!c) throw Error("ExponentialGrowth design matrix is rank deficient");

  const auto nd = static_cast<double>(n);
  std::vector<double> fitted(n);
  for (std::size_t i = 0; i < n; ++i) {
    fitted[i] = std::exp((*c)[0] + (*c)[1] * static_cast<double>(i + 1) / nd);
  }
  return finish(TrendModelKind::ExponentialGrowth, {std::exp((*c)[0]), std::exp((*c)[1] / nd)}, std::move(fitted),
                series);
}

namespace {

// Logistic in scaled time: g(u) = S / (b0 + b1 * exp(k u)).
struct Logistic {
  double b0;
  double b1;
  double k;
};

// Returns false if the model has a pole or overflows on the grid.
bool logistic_values(const Logistic& p, double scale, std::size_t n, std::vector<double>& out) {
  const auto nd = static_cast<double>(n);
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = std::exp(p.k * static_cast<double>(i + 1) / nd);
    const double d = p.b0 + p.b1 * e;
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    out[i] = scale / d;
  }
  return true;
}

double sse(std::span<const double> y, std::span<const double> g) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - g[i];
    s += e * e;
  }
  return s;
}

// Three equally spaced windows: z = S / y is affine in exp(k u), so three
// window means pin down (b0, b1, k).
Logistic three_point_start(std::span<const double> y, double scale) {
  const std::size_t n = y.size();
  const std::size_t w = n / 20;
  std::size_t c1 = w;
  std::size_t c3 = n - 1 - w;
  if ((c3 - c1) % 2 != 0) --c3;
  const std::size_t c2 = (c1 + c3) / 2;
  auto window_mean = [&](std::size_t c) {
    double s = 0.0;
    for (std::size_t i = c - w; i <= c + w; ++i) s += y[i];
    return s / static_cast<double>(2 * w + 1);
  };
  const double z1 = scale / window_mean(c1);
  const double z2 = scale / window_mean(c2);
  const double z3 = scale / window_mean(c3);
  const auto nd = static_cast<double>(n);
  const double h = static_cast<double>(c2 - c1) / nd;
  const double u1 = static_cast<double>(c1 + 1) / nd;

  const double q = (z3 - z2) / (z2 - z1);
  if (std::isfinite(q) && q > 0.0 && std::abs(q - 1.0) > 1e-9) {
    const double k = std::log(q) / h;
    const double amp = (z2 - z1) / (q - 1.0);  // b1 * exp(k u1)
    Logistic p{z1 - amp, amp * std::exp(-k * u1), k};
    std::vector<double> g;
    if (logistic_values(p, scale, n, g)) return p;
  }
  // Fallback: a mild sigmoid spanning the observed range.
  const double lo = *std::min_element(y.begin(), y.end());
  const double hi = *std::max_element(y.begin(), y.end());
  const bool growing = y.front() <= y.back();
  const double b0 = scale / (growing ? hi : lo);
  const double b1 = std::max(scale / (growing ? lo : hi) - b0, 1e-3 * b0);
  return {b0, b1, growing ? -5.0 : 5.0};
}

}  // namespace

TrendFit fit_scurve(std::span<const double> y, const SCurveOptions& options) {
  const std::size_t n = y.size();
  if (n < 4) throw Error("SCurve fit needs at least 4 samples");
  require_finite(y);
  for (double v : y) {
    if (!(v > 0.0)) throw Error("SCurve fit needs strictly positive values");
  }
  const double a = std::ceil(std::log10(*std::max_element(y.begin(), y.end())));
  const double scale = std::pow(10.0, a);
  const auto nd = static_cast<double>(n);

  Logistic p = three_point_start(y, scale);
  std::vector<double> g;
  if (!logistic_values(p, scale, n, g)) throw Error("SCurve initialization failed");
  double obj = sse(y, g);
  const double y_energy = std::inner_product(y.begin(), y.end(), y.begin(), 0.0);

  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;
  std::vector<double> trial;
  for (; iter < options.max_iterations && !converged; ++iter) {
    if (obj <= 1e-30 * y_energy) {
      converged = true;
      break;
    }
    // Normal equations J^T J and J^T r for r = y - g.
    double jtj[9] = {};
    double jtr[3] = {};
    for (std::size_t i = 0; i < n; ++i) {
      const double u = static_cast<double>(i + 1) / nd;
      const double e = std::exp(p.k * u);
      const double d = p.b0 + p.b1 * e;
      const double gd = g[i] / d;  // S / d^2
      const double j[3] = {-gd, -gd * e, -gd * p.b1 * e * u};
      const double r = y[i] - g[i];
      for (int rr = 0; rr < 3; ++rr) {
        jtr[rr] += j[rr] * r;
        for (int cc = 0; cc < 3; ++cc) jtj[rr * 3 + cc] += j[rr] * j[cc];
      }
    }

    bool accepted = false;
    while (!accepted && lambda < 1e16) {
      std::vector<double> m(jtj, jtj + 9);
      for (int d = 0; d < 3; ++d) m[d * 3 + d] += lambda * std::max(jtj[d * 3 + d], 1e-300);
      const auto step = detail::solve_square(m, {jtr[0], jtr[1], jtr[2]});
      if (!step) {
        lambda *= 10.0;
        continue;
      }
      const Logistic cand{p.b0 + (*step)[0], p.b1 + (*step)[1], p.k + (*step)[2]};
      if (logistic_values(cand, scale, n, trial)) {
        const double cand_obj = sse(y, trial);
        if (cand_obj < obj) {
          const double rel = (obj - cand_obj) / obj;
          p = cand;
          g.swap(trial);
          obj = cand_obj;
          lambda = std::max(lambda / 10.0, 1e-12);
          accepted = true;
          if (rel < options.relative_tolerance) converged = true;
          break;
        }
      }
      lambda *= 10.0;
    }
    // No descent direction left at any damping: a stationary point.
    if (!accepted) converged = true;
  }
  if (!converged) {
    throw Error("SCurve solver did not converge within " + std::to_string(options.max_iterations) + " iterations");
  }

  auto fit = finish(TrendModelKind::SCurve, {p.b0, p.b1, std::exp(p.k / nd), a}, g, y);
  fit.iterations = iter;
  return fit;
}

TrendFit fit(TrendModelKind kind, std::span<const double> series) {
  switch (kind) {
    case TrendModelKind::Linear: return fit_linear(series);
    case TrendModelKind::ExponentialGrowth: return fit_exponential(series);
    case TrendModelKind::Quadratic: return fit_quadratic(series);
    case TrendModelKind::SCurve: return fit_scurve(series);
  }
  throw Error("unknown model kind");
}

double evaluate(const TrendFit& f, double t) {
  const auto& c = f.coefficients;
  switch (f.kind) {
    case TrendModelKind::Linear: return c[0] + c[1] * t;
    case TrendModelKind::ExponentialGrowth: return c[0] * std::pow(c[1], t);
    case TrendModelKind::Quadratic: return c[0] + c[1] * t + c[2] * t * t;
    case TrendModelKind::SCurve: return std::pow(10.0, c[3]) / (c[0] + c[1] * std::pow(c[2], t));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

const TrendFit& ModelSelection::best_fit() const {
  const auto* f = find(best);
  if (f == nullptr) throw Error("selected model missing from fits");
  return *f;
}

const TrendFit* ModelSelection::find(TrendModelKind kind) const {
  for (const auto& f : fits) {
    if (f.kind == kind) return &f;
  }
  return nullptr;
}

namespace {

// -1 if a is better, 1 if b is better, 0 when tied.
int compare_measure(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return 0;
  if (std::isnan(a)) return 1;
  if (std::isnan(b)) return -1;
  const double tol = 1e-9 * std::max({std::abs(a), std::abs(b), 1.0});
  if (std::abs(a - b) <= tol) return 0;
  return a < b ? -1 : 1;
}

bool better(const TrendFit& a, const TrendFit& b) {
  for (const auto& [x, y] : {std::pair{a.accuracy.mape, b.accuracy.mape}, std::pair{a.accuracy.mad, b.accuracy.mad},
                             std::pair{a.accuracy.msd, b.accuracy.msd}}) {
    const int c = compare_measure(x, y);
    if (c != 0) return c < 0;
  }
  return static_cast<int>(a.kind) < static_cast<int>(b.kind);
}

}  // namespace

ModelSelection select_model(std::span<const double> series, std::span<const TrendModelKind> models) {
  ModelSelection sel{};
  std::vector<TrendModelKind> order(models.begin(), models.end());
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  for (const auto kind : order) {
    try {
      sel.fits.push_back(fit(kind, series));
    } catch (const Error& e) {
      sel.skipped.push_back({kind, e.what()});
    }
  }
  if (sel.fits.empty()) throw Error("no trend model could be fitted to the series");
  const TrendFit* best = &sel.fits.front();
  for (const auto& f : sel.fits) {
    if (better(f, *best)) best = &f;
  }
  sel.best = best->kind;
  return sel;
}

QuadraticShape classify_shape(const TrendFit& f) {
  if (f.kind != TrendModelKind::Quadratic || f.coefficients.size() != 3) {
    throw Error("shape classification needs a quadratic fit");
  }
  const double b1 = f.coefficients[1];
  const double b2 = f.coefficients[2];
  const double eps = 1e-12 * std::abs(f.series_mean);
  if (std::abs(b1) <= eps || std::abs(b2) <= eps) return QuadraticShape::Degenerate;
  if (b1 > 0 && b2 > 0) return QuadraticShape::MonotoneIncreasing;
  if (b1 < 0 && b2 < 0) return QuadraticShape::MonotoneDecreasing;
  if (b1 > 0) return QuadraticShape::ConcaveDown;
  return QuadraticShape::ConcaveUp;
}

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  return std::string(buf, p);
}

std::string shortest(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

// " + 0.000720" / " - 0.000305"; the sign follows the unrounded value.
std::string signed_term(double v, const std::function<std::string(double)>& fmt) {
  return (std::signbit(v) ? " - " : " + ") + fmt(std::abs(v));
}

std::string render(const TrendFit& f, const std::function<std::string(double)>& lead,
                   const std::function<std::string(double)>& slope) {
  const auto& c = f.coefficients;
  switch (f.kind) {
    case TrendModelKind::Linear:
      return "Yt = " + lead(c[0]) + signed_term(c[1], slope) + " × t";
    case TrendModelKind::Quadratic:
      return "Yt = " + lead(c[0]) + signed_term(c[1], slope) + " × t" + signed_term(c[2], slope) + " × t²";
    case TrendModelKind::ExponentialGrowth:
      return "Yt = " + lead(c[0]) + " × (" + slope(c[1]) + "^t)";
    case TrendModelKind::SCurve:
      return "Yt = (10^" + shortest(c[3]) + ") / (" + slope(c[0]) + signed_term(c[1], slope) + " × (" + slope(c[2]) +
             "^t))";
  }
  return {};
}

}  // namespace

std::string format_equation(const TrendFit& f, int constant_decimals, int slope_decimals) {
  return render(
      f, [&](double v) { return fixed(v, constant_decimals); }, [&](double v) { return fixed(v, slope_decimals); });
}

std::string format_equation_full(const TrendFit& f) {
  return render(f, shortest, shortest);
}

}  // namespace biovit::trend
