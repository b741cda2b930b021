#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

namespace bemspectra {

/// Minimum-cost assignment of every row to a distinct column (rows <= cols),
/// Hungarian method with potentials, O(rows^2 cols). Returns the column of
/// each row. Costs must be finite. Deterministic for a given matrix.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

/// Multiset distance between two equally sized sets of complex values:
/// optimal pairing on |a - b| / |b|, largest pair distance returned.
double multiset_relative_distance(std::span<const std::complex<double>> a, std::span<const std::complex<double>> b);

}  // namespace bemspectra
