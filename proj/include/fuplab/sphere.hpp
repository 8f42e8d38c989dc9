#pragma once

#include <vector>

namespace fuplab {

/// Deterministic direction samples on S^{d-1}.
///
/// d=2: equally spaced angles theta_j = pi*j/n (lines are unoriented), with
/// the axis-parallel and diagonal directions appended when missing.
/// d=3: Fibonacci sphere lattice of n points plus axis, face-diagonal and
/// space-diagonal directions.
std::vector<std::vector<double>> direction_sample(int dim, int n);

}  // namespace fuplab
