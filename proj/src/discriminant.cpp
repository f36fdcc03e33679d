#include "sdr/discriminant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <json.hpp>

#include "sdr/rng.hpp"

namespace sdr {

namespace {

double log_det_from_cholesky(const Matrix& l) {
  double acc = 0.0;
  for (std::size_t i = 0; i < l.rows(); ++i) acc += std::log(l(i, i));
  return 2.0 * acc;
}

// (x - mu)' inv (x - mu) for one row
double mahalanobis_sq(const double* row, const Vec& mu, const Matrix& inv) {
  const std::size_t p = mu.size();
  Vec dev(p);
  for (std::size_t j = 0; j < p; ++j) dev[j] = row[j] - mu[j];
  return dot(dev, mat_vec(inv, dev));
}

Matrix validated_json_matrix(const nlohmann::json& j) {
  const std::size_t rows = j.at("rows").get<std::size_t>();
  const std::size_t cols = j.at("cols").get<std::size_t>();
  const auto& entries = j.at("entries");
  if (entries.size() != rows * cols) throw ParseError("matrix entry count mismatch in JSON");
  Matrix m(rows, cols);
  for (std::size_t k = 0; k < rows * cols; ++k) m.data()[k] = entries[k].get<double>();
  return m;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", m.data()}};
}

}  // namespace

const char* classifier_kind_name(ClassifierKind k) {
  return k == ClassifierKind::Lda ? "LDA" : "QDA";
}

std::optional<ClassifierKind> parse_classifier_kind(const std::string& name) {
  if (name == "LDA" || name == "lda") return ClassifierKind::Lda;
  if (name == "QDA" || name == "qda") return ClassifierKind::Qda;
  return std::nullopt;
}

GaussianClassifier fit(ClassifierKind kind, const Matrix& x, const std::vector<int>& labels,
                       double gamma, bool force_gamma) {
  const GroupMoments moments = group_moments(x, labels);
  const std::size_t hcount = moments.counts.size();
  if (hcount < 2) throw SingleClass("classifier needs at least 2 classes");

  GaussianClassifier c;
  c.kind = kind;
  c.dim = x.cols();
  c.class_count = static_cast<int>(hcount);
  c.priors = moments.priors;
  c.means = moments.means;
  c.gamma_used = 0.0;

  const auto install = [&](const Matrix& cov, std::size_t n_for_force) {
    const bool force = force_gamma || c.dim >= n_for_force;
    double used = 0.0;
    const SpdMatrix s = ensure_spd(cov, gamma, force, &used);
    c.gamma_used = std::max(c.gamma_used, used);
    c.covs.push_back(s.mat());
    c.inverses.push_back(spd_inverse(s));
    c.log_dets.push_back(log_det_from_cholesky(cholesky(s)));
  };

  // force regularization exactly when the moment estimator cannot be full
  // rank: class covariances have rank n_h - 1, the pooled one n - H
  if (kind == ClassifierKind::Qda) {
    for (std::size_t h = 0; h < hcount; ++h) install(moments.covs[h], moments.counts[h]);
  } else {
    install(moments.pooled, moments.n_total - hcount + 1);
  }
  return c;
}

GaussianClassifier fit(ClassifierKind kind, const LabeledDataset& d, double gamma,
                       bool force_gamma) {
  if (d.kind == ResponseKind::Continuous)
    throw ConfigError("cannot fit a classifier to a continuous response");
  return fit(kind, d.x, d.labels, gamma, force_gamma);
}

std::vector<int> predict(const GaussianClassifier& c, const Matrix& x) {
  if (x.cols() != c.dim)
    throw ShapeMismatch("data has " + std::to_string(x.cols()) + " columns, classifier expects " +
                        std::to_string(c.dim));
  const std::size_t hcount = c.priors.size();
  std::vector<int> labels(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    int best = 1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t h = 0; h < hcount; ++h) {
      const double score = std::log(c.priors[h]) - 0.5 * c.log_det_for(h) -
                           0.5 * mahalanobis_sq(x.row(i), c.means[h], c.inverse_for(h));
      if (score > best_score) {
        best_score = score;
        best = static_cast<int>(h + 1);
      }
    }
    labels[i] = best;
  }
  return labels;
}

double cer(const GaussianClassifier& c, const Matrix& x, const std::vector<int>& labels) {
  if (x.rows() == 0) throw EmptyTestSet("test set has no rows");
  if (labels.size() != x.rows())
    throw ShapeMismatch("label count " + std::to_string(labels.size()) + " vs " +
                        std::to_string(x.rows()) + " rows");
  const std::vector<int> predicted = predict(c, x);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (predicted[i] != labels[i]) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

double cer(const GaussianClassifier& c, const LabeledDataset& d) { return cer(c, d.x, d.labels); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double oer_lda_full(const Vec& mu1, const Vec& mu2, const SpdMatrix& sigma) {
  if (mu1.size() != mu2.size() || mu1.size() != sigma.dim())
    throw ShapeMismatch("mean/covariance dimensions disagree");
  const Vec delta = mu2 - mu1;
  const Matrix l = cholesky(sigma);
  const Vec w = forward_solve(l, delta);
  return normal_cdf(-0.5 * std::sqrt(dot(w, w)));
}

double oer_1d(const OerInputs1D& in) {
  if (!(in.sigma1 > 0.0) || !(in.sigma2 > 0.0) || !std::isfinite(in.sigma1) ||
      !std::isfinite(in.sigma2))
    throw InvalidSigma("standard deviations must be positive and finite");

  double m1 = in.mu1, m2 = in.mu2, s1 = in.sigma1, s2 = in.sigma2;
  if (std::abs(s1 - s2) <= 1e-10 * std::max(s1, s2)) {
    const double sbar = 0.5 * (s1 + s2);
    return normal_cdf(-std::abs(m2 - m1) / (2.0 * sbar));
  }
  if (s1 > s2) {
    std::swap(m1, m2);
    std::swap(s1, s2);
  }

  // The quadratic rule's two boundaries standardize to (+-s2*tau - s1*m)/d2
  // under class 1 and (+-s1*tau - s2*m)/d2 under class 2.
  const double m = m2 - m1;
  const double d2 = s2 * s2 - s1 * s1;
  const double tau = std::sqrt(m * m + d2 * std::log((s2 * s2) / (s1 * s1)));
  const double err1 = normal_cdf((-s1 * m - s2 * tau) / d2) + normal_cdf((s1 * m - s2 * tau) / d2);
  const double err2 = normal_cdf((s1 * tau - s2 * m) / d2) - normal_cdf((-s2 * m - s1 * tau) / d2);
  return 0.5 * (err1 + err2);
}

McEstimate mc_oer_oracle(const OerInputs1D& in, std::size_t samples, std::uint64_t seed) {
  if (!(in.sigma1 > 0.0) || !(in.sigma2 > 0.0))
    throw InvalidSigma("standard deviations must be positive");
  RngStream rng(seed, 0);
  const std::size_t n1 = samples / 2;
  const std::size_t n2 = samples - n1;
  const auto log_density = [](double x, double mu, double s) {
    const double z = (x - mu) / s;
    return -std::log(s) - 0.5 * z * z;
  };
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < n1; ++i) {
    const double x = in.mu1 + in.sigma1 * rng.normal();
    if (log_density(x, in.mu2, in.sigma2) > log_density(x, in.mu1, in.sigma1)) ++wrong;
  }
  for (std::size_t i = 0; i < n2; ++i) {
    const double x = in.mu2 + in.sigma2 * rng.normal();
    if (!(log_density(x, in.mu2, in.sigma2) > log_density(x, in.mu1, in.sigma1))) ++wrong;
  }
  McEstimate out;
  out.estimate = static_cast<double>(wrong) / static_cast<double>(samples);
  out.se = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(samples));
  return out;
}

std::string classifier_to_json(const GaussianClassifier& c) {
  nlohmann::json j;
  j["kind"] = classifier_kind_name(c.kind);
  j["dim"] = c.dim;
  j["class_count"] = c.class_count;
  j["priors"] = c.priors;
  j["means"] = c.means;
  j["covariances"] = nlohmann::json::array();
  for (const Matrix& cov : c.covs) j["covariances"].push_back(matrix_to_json(cov));
  j["gamma_used"] = c.gamma_used;
  return j.dump(2);
}

GaussianClassifier classifier_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad classifier JSON: ") + e.what());
  }
  try {
    GaussianClassifier c;
    const auto kind = parse_classifier_kind(j.at("kind").get<std::string>());
    if (!kind) throw ParseError("unknown classifier kind in JSON");
    c.kind = *kind;
    c.dim = j.at("dim").get<std::size_t>();
    c.class_count = j.at("class_count").get<int>();
    c.priors = j.at("priors").get<Vec>();
    c.means = j.at("means").get<std::vector<Vec>>();
    for (const auto& jm : j.at("covariances")) {
      const Matrix cov = validated_json_matrix(jm);
      const SpdMatrix s{cov};
      c.covs.push_back(s.mat());
      c.inverses.push_back(spd_inverse(s));
      c.log_dets.push_back(log_det_from_cholesky(cholesky(s)));
    }
    c.gamma_used = j.at("gamma_used").get<double>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad classifier JSON: ") + e.what());
  }
}

}  // namespace sdr
