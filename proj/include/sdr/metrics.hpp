#pragma once

#include "sdr/linalg.hpp"

namespace sdr {

// Coordinate-free gap between two d-dimensional subspaces of R^p, given as
// p x d spanning matrices: ||P_a - P_b||_F / sqrt(2d), which lives in [0,1].
// Only the spans matter; either argument may be any full-rank basis.
double subspace_distance(const Matrix& truth, const Matrix& estimate);

}  // namespace sdr
