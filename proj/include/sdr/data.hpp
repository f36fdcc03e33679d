#pragma once

#include <string>
#include <vector>

#include "sdr/linalg.hpp"

namespace sdr {

enum class ResponseKind { Binary, Categorical, Continuous };

const char* response_kind_name(ResponseKind kind);
ResponseKind parse_response_kind(const std::string& name);

// Predictor matrix plus one response column. Labels are 1..class_count for
// binary/categorical responses; y holds the continuous response otherwise.
struct LabeledDataset {
  Matrix x;
  ResponseKind kind = ResponseKind::Continuous;
  std::vector<int> labels;
  Vec y;
  int class_count = 0;
  std::vector<std::string> class_names;  // label h -> class_names[h-1]; empty when labels were numeric 1..H

  std::size_t n() const { return x.rows(); }
  std::size_t p() const { return x.cols(); }
};

struct CsvSchema {
  int response_column = -1;   // 0-based index; -1 means last column
  std::string response_name;  // picked over the index when nonempty (requires a header)
  ResponseKind kind = ResponseKind::Continuous;
  bool has_header = true;
};

// RFC-4180-style reader: quoted fields, embedded commas/newlines, doubled
// quotes. Numbers must use '.' decimal. Labels that are all integers forming
// exactly {1..H} pass through verbatim (keeps save/load round trips
// bit-identical); any other label set maps in first-appearance order.
LabeledDataset load_csv(const std::string& path, const CsvSchema& schema);

// Writes predictors with 17 significant digits and the response as the final
// column. load_csv of the output reproduces the dataset bit for bit.
void save_csv(const LabeledDataset& d, const std::string& path, bool with_header = true);

struct SliceAssignment {
  int slice_count = 0;
  std::vector<int> membership;  // 1..H per observation
  Vec boundaries;               // H-1 cut values (smallest y of each upper slice)
};

// Equal-frequency slicing of a continuous response into h slices. Ties on a
// boundary value all land in the lower slice. Membership depends only on the
// ordering of y, so any strictly increasing transform leaves it unchanged.
SliceAssignment slice_continuous(const Vec& y, int h);

struct GroupMoments {
  std::size_t n_total = 0;
  std::vector<std::size_t> counts;
  Vec priors;  // n_h / n
  std::vector<Vec> means;
  std::vector<Matrix> covs;  // divisor n_h - 1
  Vec grand_mean;
  Matrix pooled;    // sum_h pi_h covs[h]
  Matrix marginal;  // covariance of all rows, divisor n - 1
};

// groups holds 1..H per row (class labels or slice membership).
GroupMoments group_moments(const Matrix& x, const std::vector<int>& groups);

// Rows mapped to sx^{-1/2} (x_i - xbar) with xbar the grand mean of x.
Matrix standardize(const Matrix& x, const SpdMatrix& sx);

}  // namespace sdr
