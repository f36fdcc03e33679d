#include "sdr/simgen.hpp"

#include <cmath>
#include <utility>

namespace sdr {

namespace {

constexpr double kQEigTol = 1e-10;

void require_p(std::size_t p, std::size_t minimum, const char* tag) {
  if (p < minimum)
    throw ConfigError(std::string(tag) + " needs p >= " + std::to_string(minimum) + ", got " +
                      std::to_string(p));
}

double uniform_in(RngStream& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.uniform01();
}

// span{Sigma_2^{-1} mu_2 - Sigma_1^{-1} mu_1} plus the eigenvectors of
// Sigma_2^{-1} - Sigma_1^{-1} with nonnegligible eigenvalues; equal
// covariances collapse this to the single pooled-inverse mean gap.
Matrix true_basis(const Vec& mu1, const Vec& mu2, const SpdMatrix& sigma1,
                  const SpdMatrix& sigma2) {
  const std::size_t p = mu1.size();
  const Matrix inv1 = spd_inverse(sigma1);
  if (max_abs(sigma2.mat() - sigma1.mat()) == 0.0) {
    return orthonormal_basis(matrix_from_column(mat_vec(inv1, mu2 - mu1)));
  }
  const Matrix inv2 = spd_inverse(sigma2);
  const Vec lin = mat_vec(inv2, mu2) - mat_vec(inv1, mu1);
  const EigResult quad = sym_eig(symmetrized(inv2 - inv1));
  std::vector<Vec> cols;
  cols.push_back(lin);
  for (std::size_t j = 0; j < p; ++j)
    if (std::abs(quad.values[j]) > kQEigTol) cols.push_back(column(quad.vectors, j));
  Matrix span(p, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) set_column(span, j, cols[j]);
  return orthonormal_basis(span);
}

SimulationTruth finish_truth(Vec mu1, Vec mu2, SpdMatrix sigma1, SpdMatrix sigma2,
                             ClassifierKind classifier) {
  SimulationTruth t;
  t.basis = true_basis(mu1, mu2, sigma1, sigma2);
  t.true_d = t.basis.cols();
  t.classifier = classifier;
  t.mixture.components.emplace_back(0.5, std::move(mu1), std::move(sigma1));
  t.mixture.components.emplace_back(0.5, std::move(mu2), std::move(sigma2));
  t.mixture.validate();
  return t;
}

// [rho I_b + (1-rho)(J_b - I_b)] oplus I_{p-b}
SpdMatrix block_exchangeable(std::size_t p, std::size_t b, double rho) {
  Matrix m = Matrix::identity(p);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) m(i, j) = (i == j) ? rho : 1.0 - rho;
  }
  return SpdMatrix(m);
}

// mu_2 = (1_5, -1_5, 0_{p-10}); fixed even when the covariance block widens
Vec q2_mean(std::size_t p) {
  Vec mu(p, 0.0);
  for (std::size_t i = 0; i < 5; ++i) mu[i] = 1.0;
  for (std::size_t i = 5; i < 10; ++i) mu[i] = -1.0;
  return mu;
}

LabeledDataset dataset_shell(std::size_t n, std::size_t p, ResponseKind kind, int class_count) {
  LabeledDataset d;
  d.x = Matrix(n, p);
  d.kind = kind;
  d.class_count = class_count;
  return d;
}

void fill_mvn_row(Matrix& x, std::size_t i, const Vec& mu, const Matrix& l, RngStream& rng,
                  Vec& z) {
  const std::size_t p = mu.size();
  for (std::size_t j = 0; j < p; ++j) z[j] = rng.normal();
  double* row = x.row(i);
  for (std::size_t j = 0; j < p; ++j) {
    double acc = mu[j];
    const double* lrow = l.row(j);
    for (std::size_t k = 0; k <= j; ++k) acc += lrow[k] * z[k];
    row[j] = acc;
  }
}

}  // namespace

const char* config_tag_name(ConfigTag tag) {
  switch (tag) {
    case ConfigTag::Q1: return "Q1";
    case ConfigTag::Q2: return "Q2";
    case ConfigTag::Q3: return "Q3";
    case ConfigTag::L1: return "L1";
    case ConfigTag::L2: return "L2";
    case ConfigTag::L3: return "L3";
  }
  return "?";
}

const char* regression_tag_name(RegressionTag tag) {
  switch (tag) {
    case RegressionTag::D1: return "D1";
    case RegressionTag::D2: return "D2";
    case RegressionTag::D3: return "D3";
  }
  return "?";
}

std::optional<ConfigTag> parse_config_tag(const std::string& name) {
  if (name == "Q1") return ConfigTag::Q1;
  if (name == "Q2") return ConfigTag::Q2;
  if (name == "Q3") return ConfigTag::Q3;
  if (name == "L1") return ConfigTag::L1;
  if (name == "L2") return ConfigTag::L2;
  if (name == "L3") return ConfigTag::L3;
  return std::nullopt;
}

std::optional<RegressionTag> parse_regression_tag(const std::string& name) {
  if (name == "D1") return RegressionTag::D1;
  if (name == "D2") return RegressionTag::D2;
  if (name == "D3") return RegressionTag::D3;
  return std::nullopt;
}

SimulationTruth make_config(ConfigTag tag, std::size_t p, RngStream& rng) {
  switch (tag) {
    case ConfigTag::Q1: {
      require_p(p, 2, "Q1");
      Vec mu2(p);
      for (std::size_t j = 0; j < p; ++j) mu2[j] = rng.normal();
      Matrix s2 = Matrix::identity(p);
      s2(0, 0) = 3.0;
      s2(0, 1) = -2.0;
      s2(1, 0) = -2.0;
      s2(1, 1) = 3.0;
      return finish_truth(Vec(p, 0.0), std::move(mu2), SpdMatrix::identity(p), SpdMatrix(s2),
                          ClassifierKind::Qda);
    }
    case ConfigTag::Q2:
      require_p(p, 10, "Q2");
      return finish_truth(Vec(p, 0.0), q2_mean(p), SpdMatrix::identity(p),
                          block_exchangeable(p, 5, 0.99), ClassifierKind::Qda);
    case ConfigTag::Q3: {
      require_p(p, 2, "Q3");
      Vec mu2(p, 0.0);
      mu2[p - 1] = 1.0;
      Matrix s = scaled(Matrix::identity(p), 2.0);
      s(p - 1, p - 1) = 1.0;
      SpdMatrix sigma(s);
      return finish_truth(Vec(p, 0.0), std::move(mu2), sigma, sigma, ClassifierKind::Qda);
    }
    case ConfigTag::L1: {
      require_p(p, 2, "L1");
      const SpdMatrix sigma = compound_symmetry(p, 0.25);
      return finish_truth(Vec(p, 0.0), Vec(p, 1.0), sigma, sigma, ClassifierKind::Lda);
    }
    case ConfigTag::L2: {
      require_p(p, 3, "L2");
      Vec mu1(p, 0.0);
      mu1[0] = 1.0;
      mu1[1] = 1.0;
      Vec mu2 = scaled(mu1, -1.0);
      // I_2 oplus s^2 [(1-rho) I + rho J], s^2 = 10, rho = 0.99
      Matrix s = Matrix::identity(p);
      for (std::size_t i = 2; i < p; ++i)
        for (std::size_t j = 2; j < p; ++j) s(i, j) = (i == j) ? 10.0 : 9.9;
      SpdMatrix sigma(s);
      return finish_truth(std::move(mu1), std::move(mu2), sigma, sigma, ClassifierKind::Lda);
    }
    case ConfigTag::L3:
      require_p(p, 20, "L3");
      return finish_truth(Vec(p, 0.0), q2_mean(p), SpdMatrix::identity(p),
                          block_exchangeable(p, 20, 0.99), ClassifierKind::Lda);
  }
  throw InvalidTag("unknown configuration tag");
}

RegressionSpec make_regression(RegressionTag tag, std::size_t p, RngStream& rng) {
  RegressionSpec spec;
  spec.tag = tag;
  switch (tag) {
    case RegressionTag::D1: {
      require_p(p, 1, "D1");
      spec.d = 1;
      spec.beta = Matrix(p, 1);
      for (std::size_t j = 0; j < p; ++j) spec.beta(j, 0) = rng.normal();
      break;
    }
    case RegressionTag::D2:
    case RegressionTag::D3: {
      require_p(p, 30, tag == RegressionTag::D2 ? "D2" : "D3");
      spec.d = 2;
      spec.beta = Matrix(p, 2);
      for (std::size_t i = 0; i < 30; ++i) spec.beta(i, 0) = uniform_in(rng, 0.30, 0.60);
      for (std::size_t j = 0; j < 15; ++j) spec.beta(j, 1) = uniform_in(rng, 0.30, 0.60);
      for (std::size_t j = 15; j < 30; ++j) spec.beta(j, 1) = uniform_in(rng, -0.60, -0.30);
      break;
    }
  }

  if (tag == RegressionTag::D3) {
    Vec mu(p, 0.0);
    for (std::size_t i = 0; i < 30; ++i) mu[i] = -1.0;
    spec.predictors.components.emplace_back(0.40, mu, ar_covariance(p, 0.10));
    spec.predictors.components.emplace_back(0.20, Vec(p, 0.0), ar_covariance(p, 0.50));
    spec.predictors.components.emplace_back(0.40, scaled(mu, -1.0), ar_covariance(p, 0.90));
  } else {
    spec.predictors.components.emplace_back(1.0, Vec(p, 0.0), ar_covariance(p, 0.50));
  }
  spec.predictors.validate();
  spec.basis = orthonormal_basis(spec.beta);
  return spec;
}

Matrix sample_mvn(const Vec& mu, const SpdMatrix& sigma, std::size_t n, RngStream& rng) {
  if (mu.size() != sigma.dim()) throw ShapeMismatch("mean and covariance dimensions disagree");
  const Matrix l = cholesky(sigma);
  Matrix x(n, mu.size());
  Vec z(mu.size());
  for (std::size_t i = 0; i < n; ++i) fill_mvn_row(x, i, mu, l, rng, z);
  return x;
}

LabeledDataset generate_classification(const SimulationTruth& truth,
                                       const std::vector<std::size_t>& per_class,
                                       RngStream& rng) {
  truth.mixture.validate();
  const std::size_t hcount = truth.mixture.h();
  if (per_class.size() != hcount)
    throw ShapeMismatch("per-class sizes cover " + std::to_string(per_class.size()) +
                        " classes, mixture has " + std::to_string(hcount));
  const std::size_t p = truth.mixture.p();
  std::size_t total = 0;
  for (std::size_t nh : per_class) total += nh;

  LabeledDataset d = dataset_shell(
      total, p, hcount == 2 ? ResponseKind::Binary : ResponseKind::Categorical,
      static_cast<int>(hcount));
  d.labels.reserve(total);
  Vec z(p);
  std::size_t row = 0;
  for (std::size_t h = 0; h < hcount; ++h) {
    const GaussianComponent& comp = truth.mixture.components[h];
    const Matrix l = cholesky(comp.cov);
    for (std::size_t i = 0; i < per_class[h]; ++i, ++row) {
      fill_mvn_row(d.x, row, comp.mean, l, rng, z);
      d.labels.push_back(static_cast<int>(h + 1));
    }
  }
  return d;
}

LabeledDataset generate_regression(const RegressionSpec& spec, std::size_t n, RngStream& rng) {
  spec.predictors.validate();
  const std::size_t p = spec.predictors.p();
  const std::size_t hcount = spec.predictors.h();

  std::vector<Matrix> factors;
  factors.reserve(hcount);
  Vec cumulative(hcount, 0.0);
  double acc = 0.0;
  for (std::size_t c = 0; c < hcount; ++c) {
    factors.push_back(cholesky(spec.predictors.components[c].cov));
    acc += spec.predictors.components[c].weight;
    cumulative[c] = acc;
  }

  LabeledDataset d = dataset_shell(n, p, ResponseKind::Continuous, 0);
  d.y.resize(n);
  Vec z(p);
  Vec xi(p);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t comp = 0;
    if (hcount > 1) {
      const double u = rng.uniform01();
      while (comp + 1 < hcount && u >= cumulative[comp]) ++comp;
    }
    fill_mvn_row(d.x, i, spec.predictors.components[comp].mean, factors[comp], rng, z);
    const double eps = spec.noise_scale * rng.normal();
    const double* row = d.x.row(i);
    for (std::size_t j = 0; j < p; ++j) xi[j] = row[j];
    if (spec.tag == RegressionTag::D1) {
      d.y[i] = dot(column(spec.beta, 0), xi) + eps;
    } else {
      d.y[i] = dot(column(spec.beta, 0), xi) * std::exp(dot(column(spec.beta, 1), xi) + eps);
    }
  }
  return d;
}

SpdMatrix ar_covariance(std::size_t p, double rho) {
  if (!(rho > -1.0 && rho < 1.0)) throw ConfigError("AR parameter must lie in (-1, 1)");
  Matrix m(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      m(i, j) = std::pow(rho, std::abs(static_cast<double>(i) - static_cast<double>(j)));
  return SpdMatrix(m);
}

SpdMatrix compound_symmetry(std::size_t p, double rho) {
  if (p < 1) throw ConfigError("dimension must be positive");
  const double lower = p > 1 ? -1.0 / (static_cast<double>(p) - 1.0) : -1.0;
  if (!(rho > lower && rho < 1.0))
    throw ConfigError("compound-symmetry parameter outside the positive-definite range");
  Matrix m(p, p, rho);
  for (std::size_t i = 0; i < p; ++i) m(i, i) = 1.0;
  return SpdMatrix(m);
}

}  // namespace sdr
