#pragma once

#include <Eigen/Dense>
#include <span>

#include "scca/types.hpp"

namespace scca::kendall {

// Kendall's tau-a: the sign-product U-statistic with denominator
// n(n-1)/2 regardless of ties (tied pairs contribute zero). This is the
// normative O(n^2) definition.
double tau_pair_naive(std::span<const double> x, std::span<const double> y);

// Same statistic via merge-sort inversion counting with tie corrections,
// O(n log n). Agrees exactly with tau_pair_naive.
double tau_pair_fast(std::span<const double> x, std::span<const double> y);

// Dispatches to the fast path for large n.
double tau_pair(std::span<const double> x, std::span<const double> y);

// Symmetric p x p matrix of pairwise tau values, unit diagonal.
// Upper-triangle pairs are computed in parallel; result is deterministic.
Eigen::MatrixXd tau_matrix(const MixedDataMatrix& data);
Eigen::MatrixXd tau_matrix(const Eigen::MatrixXd& values);

}  // namespace scca::kendall
