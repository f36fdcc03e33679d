#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdr/data.hpp"
#include "sdr/linalg.hpp"

namespace sdr {

enum class ClassifierKind { Lda, Qda };

const char* classifier_kind_name(ClassifierKind k);
std::optional<ClassifierKind> parse_classifier_kind(const std::string& name);

// Plug-in Gaussian classifier. QDA keeps one covariance per class; LDA keeps
// a single prior-weighted pooled covariance (covs.size() == 1). Inverses and
// log-determinants are cached at fit time; instances are immutable.
struct GaussianClassifier {
  ClassifierKind kind = ClassifierKind::Lda;
  std::size_t dim = 0;
  int class_count = 0;
  Vec priors;
  std::vector<Vec> means;
  std::vector<Matrix> covs;
  std::vector<Matrix> inverses;
  Vec log_dets;
  double gamma_used = 0.0;

  const Matrix& cov_for(std::size_t h) const { return covs[kind == ClassifierKind::Lda ? 0 : h]; }
  const Matrix& inverse_for(std::size_t h) const {
    return inverses[kind == ClassifierKind::Lda ? 0 : h];
  }
  double log_det_for(std::size_t h) const {
    return log_dets[kind == ClassifierKind::Lda ? 0 : h];
  }
};

GaussianClassifier fit(ClassifierKind kind, const Matrix& x, const std::vector<int>& labels,
                       double gamma = 1e-6, bool force_gamma = false);
GaussianClassifier fit(ClassifierKind kind, const LabeledDataset& d, double gamma = 1e-6,
                       bool force_gamma = false);

// 1-based labels; ties go to the smallest label
std::vector<int> predict(const GaussianClassifier& c, const Matrix& x);

double cer(const GaussianClassifier& c, const Matrix& x, const std::vector<int>& labels);
double cer(const GaussianClassifier& c, const LabeledDataset& d);

double normal_cdf(double x);

// Exact equal-prior error of the linear rule with common covariance:
// Phi(-sqrt(delta' sigma^{-1} delta)/2)
double oer_lda_full(const Vec& mu1, const Vec& mu2, const SpdMatrix& sigma);

// Projected one-dimensional class parameters; sigmas are standard deviations.
struct OerInputs1D {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double sigma1 = 1.0;
  double sigma2 = 1.0;
};

// Exact equal-prior Bayes error on a line. Equal variances (to 1e-10
// relative) use the linear-rule formula; otherwise the quadratic rule's two
// decision boundaries are integrated in closed form.
double oer_1d(const OerInputs1D& in);

struct McEstimate {
  double estimate = 0.0;
  double se = 0.0;
};

// Monte Carlo check of oer_1d: equal draws per class, each classified by
// direct density comparison.
McEstimate mc_oer_oracle(const OerInputs1D& in, std::size_t samples, std::uint64_t seed);

std::string classifier_to_json(const GaussianClassifier& c);
GaussianClassifier classifier_from_json(const std::string& text);

}  // namespace sdr
