#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sdr/data.hpp"
#include "sdr/discriminant.hpp"
#include "sdr/linalg.hpp"
#include "sdr/mixture.hpp"
#include "sdr/rng.hpp"

namespace sdr {

// Classification study tags: Q* pair with QDA, L* with LDA.
enum class ConfigTag { Q1, Q2, Q3, L1, L2, L3 };
// Regression study tags, all fit with sliced responses.
enum class RegressionTag { D1, D2, D3 };

const char* config_tag_name(ConfigTag tag);
const char* regression_tag_name(RegressionTag tag);
std::optional<ConfigTag> parse_config_tag(const std::string& name);
std::optional<RegressionTag> parse_regression_tag(const std::string& name);

// A classification ground truth: the two populations, the dimension and an
// orthonormal basis of the subspace that carries all class information, and
// the classifier the configuration is scored with.
struct SimulationTruth {
  GaussianMixtureSpec mixture;
  std::size_t true_d = 0;
  Matrix basis;  // p x true_d
  ClassifierKind classifier = ClassifierKind::Qda;
};

// Exact population parameters for a tag. Q1 consumes p standard normals from
// the stream (its second mean is random per replicate) before any data are
// drawn; every other tag consumes nothing.
SimulationTruth make_config(ConfigTag tag, std::size_t p, RngStream& rng);

// A regression ground truth: index vectors, predictor distribution, noise
// scale, and the orthonormalized span of the index vectors.
struct RegressionSpec {
  RegressionTag tag = RegressionTag::D1;
  Matrix beta;  // p x d
  std::size_t d = 0;
  GaussianMixtureSpec predictors;
  double noise_scale = 1.0;
  Matrix basis;  // p x d
};

// Consumes the tag's coefficient draws from the stream (D1: p normals;
// D2/D3: 60 uniforms).
RegressionSpec make_regression(RegressionTag tag, std::size_t p, RngStream& rng);

// Rows mu + L z with L the Cholesky factor of sigma; z via Box-Muller.
Matrix sample_mvn(const Vec& mu, const SpdMatrix& sigma, std::size_t n, RngStream& rng);

// per_class[h] rows from component h, in class blocks, labels 1..H.
LabeledDataset generate_classification(const SimulationTruth& truth,
                                       const std::vector<std::size_t>& per_class,
                                       RngStream& rng);

// Per observation: mixture component (skipped for a single component), then
// the predictor normals, then the noise draw.
LabeledDataset generate_regression(const RegressionSpec& spec, std::size_t n, RngStream& rng);

// entries rho^|i-j|
SpdMatrix ar_covariance(std::size_t p, double rho);
// (1-rho) I + rho J
SpdMatrix compound_symmetry(std::size_t p, double rho);

}  // namespace sdr
