#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "sdr/data.hpp"
#include "sdr/rng.hpp"

using namespace sdr;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& contents = "") {
    path = (std::filesystem::temp_directory_path() / name).string();
    if (!contents.empty()) {
      std::ofstream os(path, std::ios::binary);
      os << contents;
    }
  }
  ~TempFile() { std::remove(path.c_str()); }
};

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("response kind names round trip") {
  for (ResponseKind k :
       {ResponseKind::Binary, ResponseKind::Categorical, ResponseKind::Continuous})
    CHECK(parse_response_kind(response_kind_name(k)) == k);
  CHECK_THROWS_AS(parse_response_kind("ordinal"), ConfigError);
}

TEST_CASE("load_csv on a small binary file") {
  TempFile f("sdr_test_small.csv",
             "a,b,y\n"
             "1.5,2,1\n"
             "0.5,1,2\n"
             "2.5,0,1\n"
             "3.5,4,2\n");
  CsvSchema schema;
  schema.kind = ResponseKind::Binary;
  const LabeledDataset d = load_csv(f.path, schema);
  CHECK(d.n() == 4);
  CHECK(d.p() == 2);
  CHECK(d.class_count == 2);
  CHECK(d.labels == std::vector<int>{1, 2, 1, 2});
  CHECK(d.x(0, 0) == 1.5);
  CHECK(d.x(3, 1) == 4.0);
}

TEST_CASE("load_csv reports the offending cell") {
  TempFile f("sdr_test_bad.csv",
             "a,b,y\n"
             "1,2,1\n"
             "1,oops,2\n");
  CsvSchema schema;
  schema.kind = ResponseKind::Binary;
  try {
    load_csv(f.path, schema);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("oops") != std::string::npos);
    CHECK(msg.find("row 3") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);
  }
}

TEST_CASE("load_csv maps string labels in first-appearance order") {
  TempFile f("sdr_test_strings.csv",
             "x1,x2,group\n"
             "1,2,crow\n"
             "3,4,wren\n"
             "5,6,crow\n"
             "7,8,lark\n"
             "9,0,wren\n");
  CsvSchema schema;
  schema.kind = ResponseKind::Categorical;
  const LabeledDataset d = load_csv(f.path, schema);
  CHECK(d.class_count == 3);
  CHECK(d.labels == std::vector<int>{1, 2, 1, 3, 2});
  REQUIRE(d.class_names.size() == 3);
  CHECK(d.class_names[0] == "crow");
  CHECK(d.class_names[1] == "wren");
  CHECK(d.class_names[2] == "lark");
}

TEST_CASE("load_csv keeps verbatim 1..H integer labels") {
  TempFile f("sdr_test_verbatim.csv",
             "x1,y\n"
             "1,2\n"
             "2,1\n"
             "3,2\n"
             "4,1\n");
  CsvSchema schema;
  schema.kind = ResponseKind::Binary;
  const LabeledDataset d = load_csv(f.path, schema);
  // labels pass through, not renumbered by first appearance
  CHECK(d.labels == std::vector<int>{2, 1, 2, 1});
  CHECK(d.class_names.empty());
}

TEST_CASE("load_csv response column selection and errors") {
  TempFile f("sdr_test_resp.csv",
             "y,x1,x2\n"
             "1,10,20\n"
             "2,30,40\n"
             "1,50,60\n"
             "2,70,80\n");
  CsvSchema schema;
  schema.kind = ResponseKind::Binary;
  schema.response_column = 0;
  const LabeledDataset d = load_csv(f.path, schema);
  CHECK(d.p() == 2);
  CHECK(d.x(0, 0) == 10.0);

  CsvSchema by_name = schema;
  by_name.response_column = -1;
  by_name.response_name = "y";
  CHECK(load_csv(f.path, by_name).labels == d.labels);

  CsvSchema missing = by_name;
  missing.response_name = "z";
  CHECK_THROWS_AS(load_csv(f.path, missing), ParseError);

  TempFile single("sdr_test_single.csv", "x,y\n1,1\n2,1\n");
  CsvSchema s2;
  s2.kind = ResponseKind::Binary;
  CHECK_THROWS_AS(load_csv(single.path, s2), SingleClassResponse);
}

TEST_CASE("save_csv then load_csv is bit identical") {
  RngStream rng(31, 0);
  LabeledDataset d;
  d.x = Matrix(20, 3);
  for (double& v : d.x.data()) v = rng.normal() * 1e3;
  d.kind = ResponseKind::Categorical;
  d.class_count = 3;
  for (std::size_t i = 0; i < 20; ++i) d.labels.push_back(1 + static_cast<int>(i % 3));

  TempFile f1("sdr_test_rt1.csv");
  TempFile f2("sdr_test_rt2.csv");
  save_csv(d, f1.path);
  CsvSchema schema;
  schema.kind = ResponseKind::Categorical;
  const LabeledDataset back = load_csv(f1.path, schema);
  CHECK(back.x == d.x);
  CHECK(back.labels == d.labels);
  save_csv(back, f2.path);
  CHECK(slurp(f1.path) == slurp(f2.path));
}

TEST_CASE("continuous responses load and save") {
  RngStream rng(32, 0);
  LabeledDataset d;
  d.x = Matrix(15, 2);
  for (double& v : d.x.data()) v = rng.normal();
  d.kind = ResponseKind::Continuous;
  for (std::size_t i = 0; i < 15; ++i) d.y.push_back(rng.normal());

  TempFile f("sdr_test_cont.csv");
  save_csv(d, f.path);
  CsvSchema schema;  // continuous, last column
  const LabeledDataset back = load_csv(f.path, schema);
  CHECK(back.x == d.x);
  CHECK(back.y == d.y);
  CHECK(back.class_count == 0);
}

TEST_CASE("quoted fields with embedded commas") {
  TempFile f("sdr_test_quote.csv",
             "x1,\"resp,onse\"\n"
             "1,\"cat, a\"\n"
             "2,\"cat, b\"\n"
             "3,\"cat, a\"\n"
             "4,\"cat, b\"\n");
  CsvSchema schema;
  schema.kind = ResponseKind::Binary;
  const LabeledDataset d = load_csv(f.path, schema);
  CHECK(d.class_count == 2);
  CHECK(d.class_names[0] == "cat, a");
}

TEST_CASE("slice_continuous splits 1..6 into three pairs") {
  const SliceAssignment s = slice_continuous(Vec{1, 2, 3, 4, 5, 6}, 3);
  CHECK(s.slice_count == 3);
  CHECK(s.membership == std::vector<int>{1, 1, 2, 2, 3, 3});
  REQUIRE(s.boundaries.size() == 2);
  CHECK(s.boundaries[0] == 3.0);
  CHECK(s.boundaries[1] == 5.0);
}

TEST_CASE("slice_continuous puts boundary ties in the lower slice") {
  // y sorted: 1 2 2 2 5 6; the nominal cut after rank 2 lands inside the
  // run of 2s, so the whole run stays in slice 1
  const SliceAssignment s = slice_continuous(Vec{2, 1, 2, 6, 2, 5}, 2);
  CHECK(s.membership == std::vector<int>{1, 1, 1, 2, 1, 2});
}

TEST_CASE("slice_continuous errors") {
  CHECK_THROWS_AS(slice_continuous(Vec{1, 1, 1, 1}, 2), DegenerateResponse);
  CHECK_THROWS_AS(slice_continuous(Vec{1, 2, 3}, 2), TooFewObservations);
  CHECK_THROWS_AS(slice_continuous(Vec{1, 2, 3, 4}, 1), ConfigError);
}

TEST_CASE("slice_continuous balances 1000 draws into slices of 200") {
  RngStream rng(33, 0);
  Vec y(1000);
  for (double& v : y) v = rng.normal();
  const SliceAssignment s = slice_continuous(y, 5);
  std::vector<int> counts(5, 0);
  for (int m : s.membership) ++counts[m - 1];
  for (int c : counts) CHECK(c == 200);
}

TEST_CASE("slice_continuous ignores strictly increasing transforms") {
  RngStream rng(34, 0);
  Vec y(97);
  for (double& v : y) v = rng.normal();
  Vec t(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) t[i] = std::exp(0.5 * y[i]) + 3.0;
  const SliceAssignment a = slice_continuous(y, 5);
  const SliceAssignment b = slice_continuous(t, 5);
  CHECK(a.membership == b.membership);
}

TEST_CASE("group_moments hand case {0,2} vs {10,12}") {
  Matrix x(4, 1);
  x(0, 0) = 0.0;
  x(1, 0) = 2.0;
  x(2, 0) = 10.0;
  x(3, 0) = 12.0;
  const GroupMoments m = group_moments(x, {1, 1, 2, 2});
  CHECK(m.n_total == 4);
  CHECK(m.counts == std::vector<std::size_t>{2, 2});
  CHECK(m.priors[0] == 0.5);
  CHECK(m.means[0][0] == 1.0);
  CHECK(m.means[1][0] == 11.0);
  CHECK(m.covs[0](0, 0) == 2.0);
  CHECK(m.covs[1](0, 0) == 2.0);
  CHECK(m.pooled(0, 0) == 2.0);
  CHECK(m.grand_mean[0] == 6.0);
  // marginal: mean 6, deviations (-6,-4,4,6), SS=104, /3
  CHECK(m.marginal(0, 0) == doctest::Approx(104.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("group_moments zero covariance for constant groups") {
  Matrix x(4, 2);
  x(0, 0) = 1.0;
  x(0, 1) = 2.0;
  x(1, 0) = 1.0;
  x(1, 1) = 2.0;
  x(2, 0) = 5.0;
  x(2, 1) = 7.0;
  x(3, 0) = 5.0;
  x(3, 1) = 7.0;
  const GroupMoments m = group_moments(x, {1, 1, 2, 2});
  CHECK(max_abs(m.covs[0]) == 0.0);
  CHECK(max_abs(m.covs[1]) == 0.0);
  CHECK(m.means[1] == Vec{5.0, 7.0});
}

TEST_CASE("group_moments errors") {
  Matrix x(3, 1);
  CHECK_THROWS_AS(group_moments(x, {1, 1, 2}), GroupTooSmall);
  CHECK_THROWS_AS(group_moments(x, {1, 1}), ShapeMismatch);
  CHECK_THROWS_AS(group_moments(x, {0, 1, 1}), ShapeMismatch);
}

TEST_CASE("group_moments tracks a known Gaussian") {
  RngStream rng(35, 0);
  const std::size_t n = 20000;
  Matrix x(n, 2);
  std::vector<int> groups(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool second = i >= n / 2;
    groups[i] = second ? 2 : 1;
    // group 1: N(0, I); group 2: mean (3, -1), var (4, 1)
    x(i, 0) = second ? 3.0 + 2.0 * rng.normal() : rng.normal();
    x(i, 1) = second ? -1.0 + rng.normal() : rng.normal();
  }
  const GroupMoments m = group_moments(x, groups);
  const double se_mean = 2.0 / std::sqrt(static_cast<double>(n / 2));
  CHECK(std::abs(m.means[1][0] - 3.0) <= 3.0 * se_mean);
  CHECK(std::abs(m.means[1][1] + 1.0) <= 3.0 * se_mean);
  // var(s^2) ~ 2 sigma^4 / (n-1)
  const double se_var = std::sqrt(2.0 * 16.0 / (n / 2.0 - 1.0));
  CHECK(std::abs(m.covs[1](0, 0) - 4.0) <= 3.0 * se_var);
  CHECK(std::abs(m.covs[0](0, 1)) <= 3.0 / std::sqrt(n / 2.0));
}

TEST_CASE("pooled covariance obeys the law of total covariance") {
  RngStream rng(36, 0);
  const std::size_t n = 60;
  Matrix x(n, 3);
  std::vector<int> groups(n);
  for (std::size_t i = 0; i < n; ++i) {
    groups[i] = 1 + static_cast<int>(i % 3);
    for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.normal() + groups[i];
  }
  const GroupMoments m = group_moments(x, groups);

  // population-style divisors: within + between = total
  Matrix within(3, 3), between(3, 3), total(3, 3);
  for (std::size_t h = 0; h < 3; ++h) {
    const double nh = static_cast<double>(m.counts[h]);
    within = within + scaled(m.covs[h], m.priors[h] * (nh - 1.0) / nh);
    const Vec dev = m.means[h] - m.grand_mean;
    between = between + scaled(outer(dev, dev), m.priors[h]);
  }
  total = scaled(m.marginal, (static_cast<double>(n) - 1.0) / static_cast<double>(n));
  CHECK(max_abs(within + between - total) <= 1e-10);
}

TEST_CASE("standardize yields identity covariance under its own marginal") {
  RngStream rng(37, 0);
  const std::size_t n = 300;
  Matrix x(n, 4);
  for (std::size_t i = 0; i < n; ++i) {
    const double base = rng.normal();
    for (std::size_t j = 0; j < 4; ++j) x(i, j) = base + 0.5 * rng.normal() * (1.0 + j);
  }
  std::vector<int> groups(n, 1);
  for (std::size_t i = 0; i < n / 2; ++i) groups[i] = 2;
  const GroupMoments m = group_moments(x, groups);
  const Matrix z = standardize(x, SpdMatrix(m.marginal));

  const GroupMoments zm = group_moments(z, groups);
  CHECK(max_abs(zm.marginal - Matrix::identity(4)) <= 1e-8);
  CHECK(norm2(zm.grand_mean) <= 1e-10);
}

TEST_CASE("standardize 1D scales by the root") {
  Matrix x(4, 1);
  x(0, 0) = 0.0;
  x(1, 0) = 2.0;
  x(2, 0) = 4.0;
  x(3, 0) = 6.0;
  Matrix s(1, 1);
  s(0, 0) = 4.0;
  const Matrix z = standardize(x, SpdMatrix(s));
  CHECK(z(0, 0) == doctest::Approx(-1.5).epsilon(1e-15));
  CHECK(z(3, 0) == doctest::Approx(1.5).epsilon(1e-15));
}
