#include "least_squares.hpp"

#include <algorithm>
#include <cmath>

namespace biovit::detail {

std::optional<std::vector<double>> solve_least_squares(std::vector<std::vector<double>> columns,
                                                       std::span<const double> y) {
  const std::size_t p = columns.size();
  const std::size_t n = y.size();
  if (p == 0 || n < p) return std::nullopt;

  std::vector<double> rhs(y.begin(), y.end());
  std::vector<double> diag(p);

  double max_norm = 0.0;
  for (const auto& c : columns) {
    double s = 0.0;
    for (double v : c) s += v * v;
    max_norm = std::max(max_norm, std::sqrt(s));
  }
  if (max_norm == 0.0) return std::nullopt;

  for (std::size_t k = 0; k < p; ++k) {
    auto& ck = columns[k];
    double norm = 0.0;
    for (std::size_t i = k; i < n; ++i) norm += ck[i] * ck[i];
    norm = std::sqrt(norm);
    if (norm <= 1e-12 * max_norm) return std::nullopt;

    const double alpha = ck[k] > 0.0 ? -norm : norm;
    // v = x - alpha e1, stored in place of the column
    ck[k] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = k; i < n; ++i) vnorm2 += ck[i] * ck[i];
    diag[k] = alpha;

    auto reflect = [&](std::vector<double>& target) {
      double dot = 0.0;
      for (std::size_t i = k; i < n; ++i) dot += ck[i] * target[i];
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t i = k; i < n; ++i) target[i] -= f * ck[i];
    };
    for (std::size_t j = k + 1; j < p; ++j) reflect(columns[j]);
    reflect(rhs);
  }

  // Back substitution on R x = Q^T y; R's strict upper part lives in columns[j][k].
  std::vector<double> x(p);
  for (std::size_t k = p; k-- > 0;) {
    double s = rhs[k];
    for (std::size_t j = k + 1; j < p; ++j) s -= columns[j][k] * x[j];
    x[k] = s / diag[k];
  }
  return x;
}

std::optional<std::vector<double>> solve_square(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    }
    if (a[pivot * n + col] == 0.0 || !std::isfinite(a[pivot * n + col])) return std::nullopt;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t c = k + 1; c < n; ++c) s -= a[k * n + c] * x[c];
    x[k] = s / a[k * n + k];
  }
  return x;
}

}  // namespace biovit::detail
