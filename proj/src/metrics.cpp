#include "sdr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdr/errors.hpp"

namespace sdr {

double subspace_distance(const Matrix& truth, const Matrix& estimate) {
  if (truth.rows() != estimate.rows())
    throw DimensionMismatch("subspaces live in different ambient dimensions: " +
                            std::to_string(truth.rows()) + " vs " +
                            std::to_string(estimate.rows()));
  if (truth.cols() != estimate.cols())
    throw DimensionMismatch("subspace dimensions differ: " + std::to_string(truth.cols()) +
                            " vs " + std::to_string(estimate.cols()));
  if (truth.cols() == 0 || truth.rows() == 0)
    throw DimensionMismatch("subspaces must be nonempty");

  const Matrix gap = projection_matrix(truth) - projection_matrix(estimate);
  const double d = static_cast<double>(truth.cols());
  const double raw = frobenius_norm(gap) / std::sqrt(2.0 * d);
  return std::clamp(raw, 0.0, 1.0);
}

}  // namespace sdr
