#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "biovit/trend.hpp"

using namespace biovit;
using namespace biovit::trend;

namespace {

std::vector<double> generate(std::size_t n, const std::function<double(double)>& f) {
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = f(static_cast<double>(i + 1));
  return y;
}

double sse(std::span<const double> y, const TrendFit& fit) {
  double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - evaluate(fit, static_cast<double>(i + 1));
    s += e * e;
  }
  return s;
}

// Normal equations in long double with centered regressor, as an
// independent check of the QR solver.
std::vector<double> normal_equations_quadratic(std::span<const double> y) {
  const std::size_t n = y.size();
  const long double c = (static_cast<long double>(n) + 1) / 2;
  long double m[3][4] = {};
  for (std::size_t i = 0; i < n; ++i) {
    const long double x = static_cast<long double>(i + 1) - c;
    const long double row[3] = {1, x, x * x};
    for (int r = 0; r < 3; ++r) {
      for (int k = 0; k < 3; ++k) m[r][k] += row[r] * row[k];
      m[r][3] += row[r] * y[i];
    }
  }
  for (int p = 0; p < 3; ++p) {
    for (int r = p + 1; r < 3; ++r) {
      const long double f = m[r][p] / m[p][p];
      for (int k = p; k < 4; ++k) m[r][k] -= f * m[p][k];
    }
  }
  long double g[3];
  for (int r = 2; r >= 0; --r) {
    long double s = m[r][3];
    for (int k = r + 1; k < 3; ++k) s -= m[r][k] * g[k];
    g[r] = s / m[r][r];
  }
  // expand g0 + g1 (t - c) + g2 (t - c)^2
  return {static_cast<double>(g[0] - g[1] * c + g[2] * c * c), static_cast<double>(g[1] - 2 * g[2] * c),
          static_cast<double>(g[2])};
}

TrendFit quadratic_with(double b0, double b1, double b2) {
  TrendFit f;
  f.kind = TrendModelKind::Quadratic;
  f.coefficients = {b0, b1, b2};
  f.series_mean = 50;
  return f;
}

}  // namespace

TEST(Trend, ModelNames) {
  for (auto k : kAllModels) EXPECT_EQ(parse_model_kind(to_string(k)), k);
  EXPECT_EQ(parse_model_kind("exponential"), TrendModelKind::ExponentialGrowth);
  EXPECT_FALSE(parse_model_kind("cubic").has_value());
}

TEST(Trend, AccuracyExamples) {
  auto a = accuracy(std::vector<double>{10, 10}, std::vector<double>{10, 10});
  EXPECT_EQ(a.mape, 0);
  EXPECT_EQ(a.mad, 0);
  EXPECT_EQ(a.msd, 0);

  a = accuracy(std::vector<double>{10, 20}, std::vector<double>{12, 18});
  EXPECT_NEAR(a.mape, 15, 1e-12);
  EXPECT_NEAR(a.mad, 2, 1e-12);
  EXPECT_NEAR(a.msd, 4, 1e-12);

  a = accuracy(std::vector<double>{0, 10}, std::vector<double>{1, 10});
  EXPECT_EQ(a.mape, 0);
  EXPECT_EQ(a.mad, 0.5);
  EXPECT_EQ(a.msd, 0.5);

  EXPECT_THROW(accuracy(std::vector<double>{0, 0}, std::vector<double>{1, 1}), Error);
  EXPECT_THROW(accuracy(std::vector<double>{1}, std::vector<double>{1, 1}), Error);
  EXPECT_THROW(accuracy(std::vector<double>{}, std::vector<double>{}), Error);
}

TEST(Trend, AccuracyTranslationCovariance) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d(50, 10);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> y(30), f(30), ys(30), fs(30);
    const double shift = d(rng);
    for (int i = 0; i < 30; ++i) {
      y[i] = d(rng);
      f[i] = d(rng);
      ys[i] = y[i] + shift;
      fs[i] = f[i] + shift;
    }
    const auto a = accuracy(y, f);
    const auto b = accuracy(ys, fs);
    EXPECT_NEAR(a.mad, b.mad, 1e-9 * (1 + a.mad));
    EXPECT_NEAR(a.msd, b.msd, 1e-9 * (1 + a.msd));
  }
}

TEST(Trend, ConstantSeries) {
  const std::vector<double> y(10, 5.0);
  const auto q = fit_quadratic(y);
  ASSERT_EQ(q.coefficients.size(), 3u);
  EXPECT_NEAR(q.coefficients[0], 5, 1e-12);
  EXPECT_EQ(q.coefficients[1], 0);
  EXPECT_EQ(q.coefficients[2], 0);
  EXPECT_EQ(q.accuracy.mape, 0);
  EXPECT_EQ(classify_shape(q), QuadraticShape::Degenerate);

  const auto l = fit_linear(y);
  EXPECT_NEAR(l.coefficients[0], 5, 1e-12);
  EXPECT_EQ(l.coefficients[1], 0);
}

TEST(Trend, VandermondeInterpolation) {
  const std::vector<double> y = {2, 3, 6};
  const auto q = fit_quadratic(y);
  EXPECT_NEAR(q.coefficients[0], 3, 1e-12);
  EXPECT_NEAR(q.coefficients[1], -2, 1e-12);
  EXPECT_NEAR(q.coefficients[2], 1, 1e-12);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(q.fitted[i], y[i], 1e-12);
}

TEST(Trend, TooFewSamples) {
  EXPECT_THROW(fit_quadratic(std::vector<double>{1, 2}), Error);
  EXPECT_THROW(fit_linear(std::vector<double>{1}), Error);
  EXPECT_THROW(fit_exponential(std::vector<double>{1}), Error);
  EXPECT_THROW(fit_scurve(std::vector<double>{1, 2, 3}), Error);
  EXPECT_THROW(fit_exponential(std::vector<double>{1, 0, 2}), Error);
  EXPECT_THROW(fit_scurve(std::vector<double>{1, 2, 0, 3, 4}), Error);
}

TEST(Trend, RecoversSlowQuadratic) {
  const auto y = generate(77566, [](double t) { return 42.186 + 0.000012 * t; });
  const auto q = fit_quadratic(y);
  EXPECT_NEAR(q.coefficients[0], 42.186, 42.186 * 1e-6);
  EXPECT_NEAR(q.coefficients[1], 0.000012, 0.000012 * 1e-6);
  EXPECT_NEAR(q.coefficients[2], 0.0, 1e-15);
  EXPECT_EQ(format_equation(q), "Yt = 42.186 + 0.000012 × t + 0.000000 × t²");
}

TEST(Trend, MatchesLongDoubleNormalEquations) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> noise(0, 8);
  for (std::size_t n : {3u, 10u, 250u, 5000u, 77566u}) {
    const auto y = generate(n, [&](double t) { return 60 - 1e-3 * t + 2e-8 * t * t + noise(rng); });
    const auto q = fit_quadratic(y);
    const auto oracle = normal_equations_quadratic(y);
    // compare fitted values, which are well conditioned
    for (double t : {1.0, static_cast<double>(n) / 2, static_cast<double>(n)}) {
      const double want = oracle[0] + oracle[1] * t + oracle[2] * t * t;
      EXPECT_NEAR(evaluate(q, t), want, 1e-8 * (1 + std::abs(want))) << "n=" << n << " t=" << t;
    }
  }
}

TEST(Trend, OlsPerturbationNeverImproves) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0, 100);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + static_cast<std::size_t>(trial) * 7;
    std::vector<double> y(n);
    for (auto& v : y) v = u(rng);
    for (auto kind : {TrendModelKind::Linear, TrendModelKind::Quadratic}) {
      const auto f = fit(kind, y);
      const double base = sse(y, f);
      for (std::size_t k = 0; k < f.coefficients.size(); ++k) {
        for (double sign : {-1.0, 1.0}) {
          auto g = f;
          g.coefficients[k] += sign * 1e-4;
          EXPECT_GE(sse(y, g), base * (1 - 1e-12)) << "trial " << trial << " coef " << k;
        }
      }
    }
  }
}

TEST(Trend, QuadraticMsdNeverExceedsLinear) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(1, 100);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> y(3 + static_cast<std::size_t>(trial) * 5);
    for (auto& v : y) v = u(rng);
    EXPECT_LE(fit_quadratic(y).accuracy.msd, fit_linear(y).accuracy.msd * (1 + 1e-12));
  }
}

TEST(Trend, ExponentialRecovery) {
  const auto y = generate(50, [](double t) { return 2 * std::pow(1.01, t); });
  const auto e = fit_exponential(y);
  EXPECT_NEAR(e.coefficients[0], 2, 2e-6);
  EXPECT_NEAR(e.coefficients[1], 1.01, 1.01e-6);
  EXPECT_EQ(format_equation(e, 3, 6), "Yt = 2.000 × (1.010000^t)");
}

TEST(Trend, SCurveRecovery) {
  const auto y = generate(100, [](double t) { return 100 / (1 + 9 * std::pow(0.9, t)); });
  const auto s = fit_scurve(y);
  ASSERT_EQ(s.coefficients.size(), 4u);
  EXPECT_EQ(s.coefficients[3], 2.0);  // a = ceil(log10 max Y)
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(s.fitted[i], y[i], 1e-3);
  EXPECT_NEAR(s.coefficients[2], 0.9, 1e-6);
  EXPECT_LE(s.iterations, 200);
}

TEST(Trend, SCurveIterationBudget) {
  const auto y = generate(100, [](double t) { return 100 / (1 + 9 * std::pow(0.9, t)) + std::sin(t); });
  SCurveOptions tight;
  tight.max_iterations = 1;
  EXPECT_THROW(fit_scurve(y, tight), Error);
}

TEST(Trend, EvaluateMatchesFitted) {
  const auto y = generate(40, [](double t) { return 10 + 0.5 * t + (static_cast<int>(t) % 3); });
  for (auto kind : kAllModels) {
    const auto f = fit(kind, y);
    for (std::size_t i = 0; i < y.size(); ++i) {
      EXPECT_NEAR(evaluate(f, static_cast<double>(i + 1)), f.fitted[i], 1e-9 * (1 + std::abs(f.fitted[i])));
    }
  }
}

TEST(Trend, SelectionPicksGeneratingFamily) {
  const auto quad = generate(60, [](double t) { return 70 - 0.8 * t + 0.01 * t * t; });
  auto sel = select_model(quad);
  EXPECT_EQ(sel.best, TrendModelKind::Quadratic);
  EXPECT_NEAR(sel.best_fit().accuracy.mape, 0, 1e-9);
  EXPECT_EQ(sel.fits.size() + sel.skipped.size(), 4u);

  const auto expo = generate(60, [](double t) { return 3 * std::pow(1.03, t); });
  sel = select_model(expo);
  EXPECT_EQ(sel.best, TrendModelKind::ExponentialGrowth);

  const auto line = generate(60, [](double t) { return 20 + 0.5 * t; });
  sel = select_model(line);
  EXPECT_EQ(sel.best, TrendModelKind::Linear);  // tie with quadratic goes to the simpler model
}

TEST(Trend, SelectionSkipsUnfittableModels) {
  std::vector<double> y = {0, 10, 20, 30, 40, 50};
  const auto sel = select_model(y);
  ASSERT_EQ(sel.skipped.size(), 2u);
  EXPECT_EQ(sel.skipped[0].kind, TrendModelKind::ExponentialGrowth);
  EXPECT_EQ(sel.skipped[1].kind, TrendModelKind::SCurve);
  EXPECT_EQ(sel.find(TrendModelKind::SCurve), nullptr);
  EXPECT_NE(sel.find(TrendModelKind::Linear), nullptr);

  const TrendModelKind only_exp[] = {TrendModelKind::ExponentialGrowth};
  EXPECT_THROW(select_model(y, only_exp), Error);
}

TEST(Trend, ShapeSignTable) {
  EXPECT_EQ(classify_shape(quadratic_with(0, 1, 1)), QuadraticShape::MonotoneIncreasing);
  EXPECT_EQ(classify_shape(quadratic_with(0, -1, -1)), QuadraticShape::MonotoneDecreasing);
  EXPECT_EQ(classify_shape(quadratic_with(0, 1, -1)), QuadraticShape::ConcaveDown);
  EXPECT_EQ(classify_shape(quadratic_with(0, -1, 1)), QuadraticShape::ConcaveUp);
  EXPECT_EQ(classify_shape(quadratic_with(5, 0, 0)), QuadraticShape::Degenerate);
  EXPECT_EQ(classify_shape(quadratic_with(5, 1, 1e-14)), QuadraticShape::Degenerate);

  TrendFit lin;
  lin.kind = TrendModelKind::Linear;
  lin.coefficients = {1, 2};
  EXPECT_THROW(classify_shape(lin), Error);
}

TEST(Trend, ShapeInvariantUnderPositiveScaling) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(1, 99);
  std::uniform_real_distribution<double> scale(0.05, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> y(20 + trial);
    for (auto& v : y) v = u(rng);
    const auto base = fit_quadratic(y);
    const double c = scale(rng);
    std::vector<double> scaled(y);
    for (auto& v : scaled) v *= c;
    const auto f = fit_quadratic(scaled);
    EXPECT_NEAR(f.coefficients[1], c * base.coefficients[1], 1e-9 * (1 + std::abs(base.coefficients[1])));
    EXPECT_NEAR(f.coefficients[2], c * base.coefficients[2], 1e-9 * (1 + std::abs(base.coefficients[2])));
    if (classify_shape(base) != QuadraticShape::Degenerate) EXPECT_EQ(classify_shape(f), classify_shape(base));
  }
}

TEST(Trend, EquationRendering) {
  EXPECT_EQ(format_equation(quadratic_with(89.3761, -0.000305, 0.0000001)),
            "Yt = 89.376 - 0.000305 × t + 0.000000 × t²");
  EXPECT_EQ(format_equation(quadratic_with(3, -2, 1)), "Yt = 3.000 - 2.000000 × t + 1.000000 × t²");
  EXPECT_EQ(format_equation_full(quadratic_with(3, -2, 1)), "Yt = 3 - 2 × t + 1 × t²");
  TrendFit lin;
  lin.kind = TrendModelKind::Linear;
  lin.coefficients = {42.186, 0.000012};
  EXPECT_EQ(format_equation(lin), "Yt = 42.186 + 0.000012 × t");
}
