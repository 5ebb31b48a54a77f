#include "biovit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace biovit::stats {

Descriptives descriptives(std::span<const double> values) {
  if (values.empty()) throw Error("descriptives of an empty sample");
  Descriptives d;
  d.n = values.size();
  const auto n = static_cast<double>(d.n);
  d.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - d.mean) * (v - d.mean);
  d.variance = d.n > 1 ? ss / (n - 1.0) : 0.0;
  d.std_dev = std::sqrt(d.variance);

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t best_run = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    if (j - i > best_run) {
      best_run = j - i;
      d.mode = sorted[i];
    }
    i = j;
  }
  return d;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace {

// log Phi(z) and log(1 - Phi(z)) without cancellation in the tails.
double log_cdf(double z) { return std::log(std::max(0.5 * std::erfc(-z / std::sqrt(2.0)), 1e-300)); }
double log_sf(double z) { return std::log(std::max(0.5 * std::erfc(z / std::sqrt(2.0)), 1e-300)); }

double ad_p_value(double a) {
  if (a >= 0.6) {
    // The quadratic term turns the exponent upward past its vertex; hold the
    // tail at the vertex value so p stays nonincreasing in A*^2.
    constexpr double kVertex = 5.709 / (2.0 * 0.0186);
    const double x = std::min(a, kVertex);
    return std::exp(1.2937 - 5.709 * x + 0.0186 * x * x);
  }
  if (a >= 0.34) return std::exp(0.9177 - 4.279 * a - 1.38 * a * a);
  if (a >= 0.2) return 1.0 - std::exp(-8.318 + 42.796 * a - 59.938 * a * a);
  return 1.0 - std::exp(-13.436 + 101.14 * a - 223.73 * a * a);
}

}  // namespace

AdResult anderson_darling(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 8) throw Error("Anderson-Darling needs at least 8 observations");
  const auto d = descriptives(values);
  if (!(d.std_dev > 0.0)) throw Error("Anderson-Darling undefined for zero variance");

  std::vector<double> z(values.begin(), values.end());
  std::sort(z.begin(), z.end());
  for (double& v : z) v = (v - d.mean) / d.std_dev;

  const auto nd = static_cast<double>(n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double weight = 2.0 * static_cast<double>(i + 1) - 1.0;
    s += weight * (log_cdf(z[i]) + log_sf(z[n - 1 - i]));
  }
  AdResult r;
  r.statistic = std::max(0.0, -nd - s / nd);
  r.adjusted = r.statistic * (1.0 + 0.75 / nd + 2.25 / (nd * nd));
  r.p_value = std::clamp(ad_p_value(r.adjusted), 0.0, 1.0);
  r.p_display = std::max(r.p_value, kPDisplayFloor);
  return r;
}

std::string_view to_string(Alternative alt) { return alt == Alternative::Greater ? "Greater" : "Less"; }

namespace {

struct Ranked {
  std::vector<double> ranks;  // midranks, combined order a then b
  double tie_term = 0.0;      // sum of t^3 - t over tie groups
};

Ranked midranks(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size() + b.size();
  std::vector<std::pair<double, std::size_t>> all;
  all.reserve(n);
  for (std::size_t i = 0; i < a.size(); ++i) all.emplace_back(a[i], i);
  for (std::size_t i = 0; i < b.size(); ++i) all.emplace_back(b[i], a.size() + i);
  std::sort(all.begin(), all.end());

  Ranked r;
  r.ranks.resize(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && all[j].first == all[i].first) ++j;
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) r.ranks[all[k].second] = mid;
    const auto t = static_cast<double>(j - i);
    r.tie_term += t * t * t - t;
    i = j;
  }
  return r;
}

// P(W >= w) or P(W <= w) under random assignment of n1 of the pooled midranks
// to the first sample.
double exact_tail(const std::vector<double>& ranks, std::size_t n1, double w, Alternative direction) {
  // Doubled midranks are integers.
  std::vector<std::size_t> scores(ranks.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    scores[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
    total += scores[i];
  }
  // ways[k][s]: subsets of size k with doubled rank sum s.
  std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(total + 1, 0.0));
  ways[0][0] = 1.0;
  std::size_t taken = 0;
  for (const std::size_t sc : scores) {
    ++taken;
    for (std::size_t k = std::min(n1, taken); k >= 1; --k) {
      auto& dst = ways[k];
      const auto& src = ways[k - 1];
      for (std::size_t s = total; s >= sc; --s) {
        dst[s] += src[s - sc];
        if (s == sc) break;
      }
    }
  }
  const auto w2 = static_cast<long long>(std::llround(2.0 * w));
  double hit = 0.0;
  double all = 0.0;
  for (std::size_t s = 0; s <= total; ++s) {
    const double c = ways[n1][s];
    all += c;
    const auto ss = static_cast<long long>(s);
    if (direction == Alternative::Greater ? ss >= w2 : ss <= w2) hit += c;
  }
  return hit / all;
}

}  // namespace

MannWhitneyResult mann_whitney(std::span<const double> a, std::span<const double> b, Alternative direction,
                               const MannWhitneyOptions& options) {
  if (a.empty() || b.empty()) throw Error("Mann-Whitney needs two nonempty samples");
  if (!(options.nominal_confidence > 0.0 && options.nominal_confidence < 100.0)) {
    throw Error("confidence level must lie in (0, 100)");
  }
  MannWhitneyResult r;
  r.n1 = a.size();
  r.n2 = b.size();
  r.direction = direction;
  const auto n1 = static_cast<double>(r.n1);
  const auto n2 = static_cast<double>(r.n2);
  const double nn = n1 + n2;

  const auto ranked = midranks(a, b);
  r.w_statistic = std::accumulate(ranked.ranks.begin(), ranked.ranks.begin() + static_cast<std::ptrdiff_t>(r.n1), 0.0);
  r.u_statistic = r.w_statistic - n1 * (n1 + 1.0) / 2.0;

  if (r.n1 <= options.exact_max_size && r.n2 <= options.exact_max_size) {
    r.exact = true;
    r.p_value = exact_tail(ranked.ranks, r.n1, r.w_statistic, direction);
  } else {
    const double mean = n1 * (nn + 1.0) / 2.0;
    const double var = n1 * n2 / 12.0 * ((nn + 1.0) - ranked.tie_term / (nn * (nn - 1.0)));
    if (var <= 0.0) {
      r.p_value = 1.0;
    } else if (direction == Alternative::Greater) {
      r.p_value = 1.0 - normal_cdf((r.w_statistic - mean - 0.5) / std::sqrt(var));
    } else {
      r.p_value = normal_cdf((r.w_statistic - mean + 0.5) / std::sqrt(var));
    }
  }
  r.p_value = std::clamp(r.p_value, 0.0, 1.0);

  std::vector<double> diffs;
  diffs.reserve(r.n1 * r.n2);
  for (double x : a) {
    for (double y : b) diffs.push_back(x - y);
  }
  std::sort(diffs.begin(), diffs.end());
  const std::size_t m = diffs.size();
  r.median_diff_point = m % 2 == 1 ? diffs[m / 2] : 0.5 * (diffs[m / 2 - 1] + diffs[m / 2]);

  const double u_mean = n1 * n2 / 2.0;
  const double u_sd = std::sqrt(n1 * n2 * (nn + 1.0) / 12.0);
  auto coverage = [&](std::size_t k) { return 1.0 - normal_cdf((static_cast<double>(k) - 0.5 - u_mean) / u_sd); };
  const double nominal = options.nominal_confidence / 100.0;
  if (coverage(1) < nominal) {
    // samples too small: only the unbounded interval reaches the level
    r.confidence = 100.0;
    r.bound = direction == Alternative::Greater ? -std::numeric_limits<double>::infinity()
                                                : std::numeric_limits<double>::infinity();
    return r;
  }
  std::size_t k = 1;
  while (k + 1 <= m && coverage(k + 1) >= nominal) ++k;
  r.confidence = 100.0 * coverage(k);
  r.bound = direction == Alternative::Greater ? diffs[k - 1] : diffs[m - k];
  return r;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw Error("pearson needs equal lengths of at least 3");
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw Error("pearson undefined for zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double standardized_alpha(double r, std::size_t k) {
  const auto kd = static_cast<double>(k);
  return kd * r / (1.0 + (kd - 1.0) * r);
}

CronbachResult cronbach_alpha(const std::vector<std::vector<double>>& items) {
  const std::size_t k = items.size();
  if (k < 2) throw Error("Cronbach's alpha needs at least 2 items");
  const std::size_t n = items.front().size();
  for (const auto& item : items) {
    if (item.size() != n) throw Error("Cronbach's alpha items must have equal lengths");
  }
  if (n < 3) throw Error("Cronbach's alpha needs at least 3 respondents");

  auto variance = [](std::span<const double> v) { return descriptives(v).variance; };
  std::vector<double> total(n, 0.0);
  double item_var_sum = 0.0;
  for (const auto& item : items) {
    item_var_sum += variance(item);
    for (std::size_t i = 0; i < n; ++i) total[i] += item[i];
  }
  const double total_var = variance(total);
  if (!(total_var > 0.0)) throw Error("Cronbach's alpha undefined for zero total variance");

  CronbachResult r;
  const auto kd = static_cast<double>(k);
  r.raw = kd / (kd - 1.0) * (1.0 - item_var_sum / total_var);

  double rsum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      rsum += pearson(items[i], items[j]);
      ++pairs;
    }
  }
  r.mean_inter_item_r = rsum / static_cast<double>(pairs);
  r.standardized = standardized_alpha(r.mean_inter_item_r, k);
  return r;
}

}  // namespace biovit::stats
