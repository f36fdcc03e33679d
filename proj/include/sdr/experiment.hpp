#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sdr/data.hpp"
#include "sdr/discriminant.hpp"
#include "sdr/kernels.hpp"
#include "sdr/ordering.hpp"

namespace sdr {

inline constexpr const char* kVersion = "sdrkit 0.1.0";

// One replication study. Q*/L* tags run the classification protocol with
// per-class training sizes; D* tags run the subspace protocol with total
// sizes. d = 0 means the tag's true dimension.
struct ExperimentConfig {
  std::string tag = "Q1";
  std::vector<Method> methods{Method::PCA};
  std::vector<Criterion> criteria{Criterion::Eigenvalue, Criterion::T};
  std::optional<ClassifierKind> classifier;  // unset: the tag's own classifier
  std::size_t d = 0;
  int h_slices = 5;
  std::vector<std::size_t> sizes;
  std::size_t replicates = 100;
  std::uint64_t seed = 1u;
  double gamma = 1e-6;
  std::size_t test_per_class = 1000;
  std::size_t p = 50;
  std::size_t workers = 1;
  std::string out_dir;

  bool is_regression() const;
  void validate() const;  // ConfigError naming the offending field
};

// fully resolved config plus the software version, as a JSON document
std::string config_to_json(const ExperimentConfig& cfg);

// One output cell. The full-feature classifier appears both in the baseline
// column and as its own rows under method FULL / criterion NONE, so the
// summary covers it too. Subspace rows have no baseline (NaN).
struct ReplicateResult {
  std::size_t replicate = 0;  // 1-based
  std::size_t n = 0;
  std::string method;
  std::string criterion;
  std::string metric;  // CER or D
  double value = 0.0;
  double baseline = 0.0;
};

std::vector<ReplicateResult> run_classification_experiment(const ExperimentConfig& cfg);
std::vector<ReplicateResult> run_subspace_experiment(const ExperimentConfig& cfg);

struct SummaryRow {
  std::string method;
  std::string criterion;
  std::size_t n = 0;
  std::string metric;
  std::size_t count = 0;
  double min = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double max = 0.0;
};

// Median/quartile table per (method, criterion, n, metric), sorted by those
// keys. Quartiles interpolate linearly at 0.25/0.75 of (count - 1).
std::vector<SummaryRow> summarize(const std::vector<ReplicateResult>& rows);

// Runs fn(0..count-1) on the given number of threads; any task exception is
// rethrown after all workers finish. Work is claimed from an atomic counter,
// so results must be written to per-index slots.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

// CSV-data workflow: reduce a training set, optionally classify a test set.
struct CsvPipelineConfig {
  std::string train_path;
  std::string test_path;  // empty: reduce-only
  CsvSchema schema;
  Method method = Method::PCA;
  Criterion criterion = Criterion::Eigenvalue;
  std::optional<ClassifierKind> classifier;
  std::size_t d = 1;
  int h_slices = 5;
  double gamma = 1e-6;
  std::size_t sweep_dmax = 0;  // > 0: also report test CER for d = 1..dmax
  std::string out_dir;         // empty: report only, write nothing
};

struct CsvPipelineReport {
  GevBasis basis;
  CriterionScores scores;
  ReducedBasis reduced;
  double test_cer = 0.0;
  bool has_test_cer = false;
  std::vector<std::pair<std::size_t, double>> sweep;
  std::vector<std::string> warnings;
};

CsvPipelineReport run_csv_pipeline(const CsvPipelineConfig& cfg);

}  // namespace sdr
