#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace biovit::detail {

// Dense least squares min ||A x - y|| via Householder QR. `columns` holds A
// column by column, each of length y.size(). Returns nullopt when A is
// numerically rank deficient.
std::optional<std::vector<double>> solve_least_squares(std::vector<std::vector<double>> columns,
                                                       std::span<const double> y);

// Solves a small square system by Gaussian elimination with partial pivoting.
// `a` is row-major n*n. Returns nullopt when singular.
std::optional<std::vector<double>> solve_square(std::vector<double> a, std::vector<double> b);

}  // namespace biovit::detail
