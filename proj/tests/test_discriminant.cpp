#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sdr/discriminant.hpp"
#include "sdr/rng.hpp"

using namespace sdr;

namespace {

Matrix column_matrix(const Vec& v) {
  Matrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

// two 1D Gaussian classes with the given parameters
void fill_two_class(Matrix& x, std::vector<int>& labels, std::size_t per_class, double mu1,
                    double s1, double mu2, double s2, RngStream& rng) {
  x = Matrix(2 * per_class, 1);
  labels.assign(2 * per_class, 1);
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const bool second = i >= per_class;
    labels[i] = second ? 2 : 1;
    x(i, 0) = second ? mu2 + s2 * rng.normal() : mu1 + s1 * rng.normal();
  }
}

}  // namespace

TEST_CASE("classifier kind names") {
  CHECK(parse_classifier_kind(classifier_kind_name(ClassifierKind::Lda)) == ClassifierKind::Lda);
  CHECK(parse_classifier_kind(classifier_kind_name(ClassifierKind::Qda)) == ClassifierKind::Qda);
  CHECK(!parse_classifier_kind("tree").has_value());
}

TEST_CASE("LDA threshold sits at the pooled midpoint for equal priors") {
  const Matrix x = column_matrix({0.0, 1.0, 9.0, 10.0});
  const std::vector<int> labels{1, 1, 2, 2};
  const GaussianClassifier c = fit(ClassifierKind::Lda, x, labels);
  // class means 0.5 and 9.5; midpoint 5
  CHECK(predict(c, column_matrix({4.9}))[0] == 1);
  CHECK(predict(c, column_matrix({5.1}))[0] == 2);
  CHECK(predict(c, column_matrix({5.0}))[0] == 1);  // exact tie, smallest label
}

TEST_CASE("predict returns each class at its own mean") {
  RngStream rng(61, 0);
  Matrix x(60, 2);
  std::vector<int> labels(60);
  for (std::size_t i = 0; i < 60; ++i) {
    const int g = 1 + static_cast<int>(i % 3);
    labels[i] = g;
    x(i, 0) = 4.0 * g + 0.1 * rng.normal();
    x(i, 1) = -2.0 * g + 0.1 * rng.normal();
  }
  for (ClassifierKind kind : {ClassifierKind::Lda, ClassifierKind::Qda}) {
    const GaussianClassifier c = fit(kind, x, labels);
    Matrix probe(3, 2);
    for (int g = 0; g < 3; ++g) {
      probe(g, 0) = c.means[g][0];
      probe(g, 1) = c.means[g][1];
    }
    CHECK(predict(c, probe) == std::vector<int>{1, 2, 3});
  }
}

TEST_CASE("QDA with equal fitted covariances reproduces LDA decisions") {
  RngStream rng(62, 0);
  Matrix x(200, 3);
  std::vector<int> labels(200);
  for (std::size_t i = 0; i < 200; ++i) {
    labels[i] = i < 120 ? 1 : 2;  // unequal priors exercise the log pi term
    for (std::size_t j = 0; j < 3; ++j)
      x(i, j) = rng.normal() + (labels[i] == 2 && j == 0 ? 1.5 : 0.0);
  }
  const GaussianClassifier lda = fit(ClassifierKind::Lda, x, labels);

  GaussianClassifier qda = lda;
  qda.kind = ClassifierKind::Qda;
  qda.covs = {lda.covs[0], lda.covs[0]};
  qda.inverses = {lda.inverses[0], lda.inverses[0]};
  qda.log_dets = {lda.log_dets[0], lda.log_dets[0]};

  Matrix grid(1000, 3);
  for (double& v : grid.data()) v = 3.0 * rng.normal();
  CHECK(predict(qda, grid) == predict(lda, grid));
}

TEST_CASE("QDA predictions match a direct density comparison") {
  RngStream rng(63, 0);
  Matrix x(400, 2);
  std::vector<int> labels(400);
  fill_two_class(x, labels, 200, 0.0, 1.0, 1.0, 2.0, rng);
  // second coordinate: plain noise
  Matrix x2(400, 2);
  for (std::size_t i = 0; i < 400; ++i) {
    x2(i, 0) = x(i, 0);
    x2(i, 1) = rng.normal() * (labels[i] == 2 ? 0.5 : 1.0);
  }
  const GaussianClassifier c = fit(ClassifierKind::Qda, x2, labels);

  Matrix grid(1000, 2);
  for (double& v : grid.data()) v = 2.5 * rng.normal();
  const std::vector<int> got = predict(c, grid);
  for (std::size_t i = 0; i < 1000; ++i) {
    Vec scores(2);
    for (std::size_t h = 0; h < 2; ++h) {
      Vec dev{grid(i, 0) - c.means[h][0], grid(i, 1) - c.means[h][1]};
      const Vec tmp = mat_vec(c.inverses[h], dev);
      scores[h] = std::log(c.priors[h]) - 0.5 * c.log_dets[h] - 0.5 * dot(dev, tmp);
    }
    const int want = scores[1] > scores[0] ? 2 : 1;
    CHECK(got[i] == want);
  }
}

TEST_CASE("fit rejects degenerate inputs") {
  const Matrix x = column_matrix({1, 2, 3, 4});
  CHECK_THROWS_AS(fit(ClassifierKind::Lda, x, {1, 1, 1, 1}), SingleClass);
  CHECK_THROWS_AS(fit(ClassifierKind::Qda, x, {1, 1, 2, 3}), GroupTooSmall);
}

TEST_CASE("cer endpoints") {
  const Matrix x = column_matrix({0.0, 1.0, 9.0, 10.0});
  const std::vector<int> labels{1, 1, 2, 2};
  const GaussianClassifier c = fit(ClassifierKind::Lda, x, labels);
  CHECK(cer(c, x, labels) == 0.0);

  // degenerate one-sided test set scores 0.5 when half the labels disagree
  const std::vector<int> flipped{2, 1, 1, 2};
  CHECK(cer(c, x, flipped) == 0.5);

  CHECK_THROWS_AS(cer(c, Matrix(0, 1), std::vector<int>{}), EmptyTestSet);
}

TEST_CASE("cer of a constant classifier on balanced data is one half") {
  // both classes fitted on the same points: priors decide, always class 1
  RngStream rng(64, 0);
  Matrix x(40, 1);
  std::vector<int> labels(40);
  for (std::size_t i = 0; i < 40; ++i) {
    x(i, 0) = rng.normal();
    labels[i] = 1 + static_cast<int>(i % 2);
  }
  Matrix sym(40, 1);
  std::vector<int> sym_labels(40);
  for (std::size_t i = 0; i < 40; ++i) {
    sym(i, 0) = x(i / 2, 0);
    sym_labels[i] = 1 + static_cast<int>(i % 2);
  }
  const GaussianClassifier c = fit(ClassifierKind::Lda, sym, sym_labels);
  CHECK(cer(c, sym, sym_labels) == 0.5);
}

TEST_CASE("oer_lda_full") {
  CHECK(oer_lda_full(Vec{1, 2}, Vec{1, 2}, SpdMatrix::identity(2)) == 0.5);
  CHECK(oer_lda_full(Vec{0, 0}, Vec{2, 0}, SpdMatrix::identity(2)) ==
        doctest::Approx(0.15865525393145705).epsilon(1e-12));

  // scale-matched: delta = 5 e3 against diag(3,2,1) gives Phi(-2.5)
  Matrix sigma(3, 3);
  sigma(0, 0) = 3.0;
  sigma(1, 1) = 2.0;
  sigma(2, 2) = 1.0;
  CHECK(oer_lda_full(Vec{0, 0, 5}, Vec{0, 0, 0}, SpdMatrix(sigma)) ==
        doctest::Approx(normal_cdf(-2.5)).epsilon(1e-12));
  CHECK(normal_cdf(-2.5) == doctest::Approx(0.006209665325776132).epsilon(1e-12));
}

TEST_CASE("oer_1d trivial and homoscedastic cases") {
  CHECK(oer_1d({0.0, 0.0, 1.0, 1.0}) == 0.5);
  CHECK(oer_1d({0.0, 2.0, 1.0, 1.0}) == doctest::Approx(normal_cdf(-1.0)).epsilon(1e-12));
  // equal-variance branch must agree with the linear formula exactly
  for (double gap : {0.1, 0.5, 1.0, 3.0, 7.0})
    CHECK(oer_1d({0.0, gap, 2.0, 2.0}) ==
          doctest::Approx(normal_cdf(-gap / 4.0)).epsilon(1e-12));
  CHECK_THROWS_AS(oer_1d({0.0, 1.0, 0.0, 1.0}), InvalidSigma);
}

TEST_CASE("oer_1d equals the known two-sided value for pure scale separation") {
  // mu1 = mu2 = 0, sigma1 = 1, sigma2 = 2: boundaries at +-r with
  // r^2 = 4/3 log 4; class 1 errs outside, class 2 errs inside
  const double r = std::sqrt(4.0 / 3.0 * std::log(4.0));
  const double expect =
      0.5 * 2.0 * normal_cdf(-r) + 0.5 * (normal_cdf(r / 2.0) - normal_cdf(-r / 2.0));
  CHECK(oer_1d({0.0, 0.0, 1.0, 2.0}) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("oer_1d symmetry and affine invariance") {
  RngStream rng(65, 0);
  for (int trial = 0; trial < 50; ++trial) {
    OerInputs1D in;
    in.mu1 = 2.0 * rng.normal();
    in.mu2 = 2.0 * rng.normal();
    in.sigma1 = 0.3 + 2.0 * rng.uniform01();
    in.sigma2 = 0.3 + 2.0 * rng.uniform01();
    const double base = oer_1d(in);

    CHECK(oer_1d({in.mu2, in.mu1, in.sigma2, in.sigma1}) ==
          doctest::Approx(base).epsilon(1e-12));

    const double shift = 3.7;
    const double scale = 0.6;
    CHECK(oer_1d({scale * in.mu1 + shift, scale * in.mu2 + shift, scale * in.sigma1,
                  scale * in.sigma2}) == doctest::Approx(base).epsilon(1e-12));

    // reflecting the line leaves the error unchanged
    CHECK(oer_1d({-in.mu1, -in.mu2, in.sigma1, in.sigma2}) ==
          doctest::Approx(base).epsilon(1e-12));
    CHECK(base >= 0.0);
    CHECK(base <= 0.5 + 1e-12);
  }
}

TEST_CASE("mc_oer_oracle hits the analytic values") {
  const McEstimate even = mc_oer_oracle({0.0, 0.0, 1.0, 1.0}, 1000000, 7);
  CHECK(std::abs(even.estimate - 0.5) <= 3.0 * even.se);

  const McEstimate gap2 = mc_oer_oracle({0.0, 2.0, 1.0, 1.0}, 1000000, 8);
  CHECK(std::abs(gap2.estimate - 0.15865525393145705) <= 3.0 * gap2.se);
  CHECK(gap2.se == doctest::Approx(std::sqrt(gap2.estimate * (1.0 - gap2.estimate) / 1e6))
                       .epsilon(1e-9));
}

TEST_CASE("oer_1d matches the oracle across heteroscedastic draws") {
  RngStream rng(66, 0);
  for (int trial = 0; trial < 12; ++trial) {
    OerInputs1D in;
    in.mu1 = 3.0 * (rng.uniform01() - 0.5);
    in.mu2 = 3.0 * (rng.uniform01() - 0.5);
    in.sigma1 = 0.4 + 1.6 * rng.uniform01();
    in.sigma2 = 0.4 + 1.6 * rng.uniform01();
    const double analytic = oer_1d(in);
    const McEstimate mc = mc_oer_oracle(in, 1000000, 100 + trial);
    CHECK(std::abs(analytic - mc.estimate) <= std::max(1e-3, 4.0 * mc.se));
  }
}

TEST_CASE("fitted Bayes rule approaches the analytic error on model data") {
  RngStream rng(67, 0);
  const OerInputs1D truth{0.0, 1.0, 1.0, 2.0};
  Matrix x;
  std::vector<int> labels;
  fill_two_class(x, labels, 500000, truth.mu1, truth.sigma1, truth.mu2, truth.sigma2, rng);

  GaussianClassifier bayes;
  bayes.kind = ClassifierKind::Qda;
  bayes.dim = 1;
  bayes.class_count = 2;
  bayes.priors = {0.5, 0.5};
  bayes.means = {Vec{truth.mu1}, Vec{truth.mu2}};
  Matrix s1(1, 1), s2(1, 1);
  s1(0, 0) = truth.sigma1 * truth.sigma1;
  s2(0, 0) = truth.sigma2 * truth.sigma2;
  bayes.covs = {s1, s2};
  bayes.inverses = {spd_inverse(SpdMatrix(s1)), spd_inverse(SpdMatrix(s2))};
  bayes.log_dets = {std::log(s1(0, 0)), std::log(s2(0, 0))};

  const double analytic = oer_1d(truth);
  const double empirical = cer(bayes, x, labels);
  const double se = std::sqrt(analytic * (1.0 - analytic) / 1e6);
  CHECK(std::abs(empirical - analytic) <= 3.0 * se);
}

TEST_CASE("classifier JSON round trip") {
  RngStream rng(68, 0);
  Matrix x(50, 2);
  std::vector<int> labels(50);
  for (std::size_t i = 0; i < 50; ++i) {
    labels[i] = 1 + static_cast<int>(i % 2);
    x(i, 0) = rng.normal() + labels[i];
    x(i, 1) = rng.normal();
  }
  for (ClassifierKind kind : {ClassifierKind::Lda, ClassifierKind::Qda}) {
    const GaussianClassifier c = fit(kind, x, labels);
    const GaussianClassifier back = classifier_from_json(classifier_to_json(c));
    CHECK(back.kind == c.kind);
    CHECK(back.dim == c.dim);
    CHECK(back.priors == c.priors);
    CHECK(back.means == c.means);
    REQUIRE(back.covs.size() == c.covs.size());
    for (std::size_t h = 0; h < c.covs.size(); ++h) CHECK(back.covs[h] == c.covs[h]);
    CHECK(back.gamma_used == c.gamma_used);

    Matrix grid(200, 2);
    for (double& v : grid.data()) v = 3.0 * rng.normal();
    CHECK(predict(back, grid) == predict(c, grid));
  }
  CHECK_THROWS_AS(classifier_from_json("not json"), ParseError);
}
