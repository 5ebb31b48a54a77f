#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "biovit/error.hpp"

namespace biovit::stats {

struct Descriptives {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // sample variance, n-1 denominator (0 when n == 1)
  double std_dev = 0.0;
  double mode = 0.0;      // most frequent value, smallest on ties
};

Descriptives descriptives(std::span<const double> values);

inline constexpr double kPDisplayFloor = 0.005;

struct AdResult {
  double statistic = 0.0;  // A^2
  double adjusted = 0.0;   // A*^2 = A^2 (1 + 0.75/n + 2.25/n^2)
  double p_value = 1.0;
  double p_display = 1.0;  // max(p_value, 0.005)
};

// Anderson-Darling normality test with mean and standard deviation
// estimated from the sample. p-values follow the piecewise exponential
// approximations of D'Agostino & Stephens (1986), table 4.9. Needs n >= 8 and
// nonzero variance.
AdResult anderson_darling(std::span<const double> values);

double normal_cdf(double z);

enum class Alternative { Greater, Less };

std::string_view to_string(Alternative alt);

struct MannWhitneyResult {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double w_statistic = 0.0;  // rank sum of the first sample, midranks on ties
  double u_statistic = 0.0;  // W - n1(n1+1)/2
  double p_value = 1.0;
  bool exact = false;
  Alternative direction = Alternative::Greater;
  double median_diff_point = 0.0;  // Hodges-Lehmann: median of a_i - b_j
  double bound = 0.0;              // lower bound for Greater, upper for Less
  double confidence = 0.0;         // achieved one-sided level, percent
};

struct MannWhitneyOptions {
  double nominal_confidence = 95.0;
  // Exact permutation distribution when both samples are at most this size.
  std::size_t exact_max_size = 20;
};

// One-sided rank-sum test of H1: a is shifted above b (Greater) or below b
// (Less).
//
// p-values: with both samples at most exact_max_size, the exact permutation
// distribution of the midrank sum (ties included) is computed by dynamic
// programming over subset counts; otherwise the normal approximation with
// tie and continuity correction is used.
//
// The confidence bound is the K-th ordered pairwise difference, K the largest
// index whose normal-approximation coverage 1 - Phi((K - 0.5 - n1 n2 / 2) /
// sigma_U) still reaches the nominal level. `confidence` reports that
// achieved coverage. Samples too small for any finite bound get an infinite
// one at 100%.
MannWhitneyResult mann_whitney(std::span<const double> a, std::span<const double> b, Alternative direction,
                               const MannWhitneyOptions& options = {});

// Sample Pearson correlation. Needs equal lengths >= 3 and nonzero variances.
double pearson(std::span<const double> x, std::span<const double> y);

struct CronbachResult {
  double raw = 0.0;           // (k/(k-1)) (1 - sum var_i / var_total)
  double standardized = 0.0;  // k rbar / (1 + (k-1) rbar)
  double mean_inter_item_r = 0.0;
};

// items[i] holds the scores of item i across respondents.
CronbachResult cronbach_alpha(const std::vector<std::vector<double>>& items);

// Standardized alpha for k items with mean inter-item correlation r.
double standardized_alpha(double r, std::size_t k = 2);

}  // namespace biovit::stats
