#include "sdr/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <ostream>

namespace sdr {

namespace {

// Ratio with the degenerate-denominator convention: no spread and no gap
// means no information (0), a gap with no spread means perfect separation
// (+inf). Both are rare enough to warrant a note.
double guarded_ratio(double num, double den, std::size_t j, const char* what) {
  if (den > 0.0) return num / den;
  if (num == 0.0) {
    std::cerr << "note: direction " << (j + 1) << " has zero " << what
              << " and zero mean gap; score set to 0\n";
    return 0.0;
  }
  std::cerr << "note: direction " << (j + 1) << " has zero " << what
            << " with a nonzero mean gap; score set to +inf\n";
  return std::numeric_limits<double>::infinity();
}

struct ProjectedGroups {
  Vec priors;
  std::vector<Vec> means;      // per group, per direction
  std::vector<Vec> variances;  // per group, per direction (divisor n_h - 1)
};

ProjectedGroups projected_group_stats(const Matrix& x, const Matrix& vectors,
                                      const std::vector<int>& groups) {
  const Matrix xp = x * vectors;
  const GroupMoments gm = group_moments(xp, groups);
  ProjectedGroups out;
  out.priors = gm.priors;
  const std::size_t k = vectors.cols();
  for (std::size_t h = 0; h < gm.counts.size(); ++h) {
    out.means.push_back(gm.means[h]);
    Vec var(k);
    for (std::size_t j = 0; j < k; ++j) var[j] = gm.covs[h](j, j);
    out.variances.push_back(std::move(var));
  }
  return out;
}

double quad_form(const Matrix& sigma, const Vec& v) { return dot(v, mat_vec(sigma, v)); }

}  // namespace

const char* criterion_name(Criterion c) {
  switch (c) {
    case Criterion::Eigenvalue: return "EIGENVALUE";
    case Criterion::T: return "T";
    case Criterion::F: return "F";
    case Criterion::Delta: return "DELTA";
    case Criterion::Psi: return "PSI";
  }
  return "?";
}

std::optional<Criterion> parse_criterion(const std::string& name) {
  if (name == "EIGENVALUE" || name == "eigenvalue" || name == "EIGEN" || name == "eigen")
    return Criterion::Eigenvalue;
  if (name == "T" || name == "t") return Criterion::T;
  if (name == "F" || name == "f") return Criterion::F;
  if (name == "DELTA" || name == "delta") return Criterion::Delta;
  if (name == "PSI" || name == "psi") return Criterion::Psi;
  return std::nullopt;
}

std::vector<int> rank_order(const Vec& theta) {
  const std::size_t p = theta.size();
  std::vector<int> ranks(p, 1);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < p; ++i)
      if (theta[i] > theta[j]) ++ranks[j];
  return ranks;
}

CriterionScores make_scores(Criterion criterion, Vec scores) {
  CriterionScores out;
  out.criterion = criterion;
  out.ranks = rank_order(scores);
  out.scores = std::move(scores);
  out.permutation.resize(out.scores.size());
  std::iota(out.permutation.begin(), out.permutation.end(), std::size_t{0});
  std::stable_sort(out.permutation.begin(), out.permutation.end(),
                   [&](std::size_t a, std::size_t b) { return out.ranks[a] < out.ranks[b]; });
  return out;
}

CriterionScores score_eigenvalue(const GevBasis& basis) {
  Vec scores(basis.values.size());
  for (std::size_t j = 0; j < scores.size(); ++j) scores[j] = std::abs(basis.values[j]);
  return make_scores(Criterion::Eigenvalue, std::move(scores));
}

CriterionScores score_t(const GevBasis& basis, const LabeledDataset& d) {
  if (d.kind == ResponseKind::Continuous)
    throw NotBinary("T criterion needs a binary response, got a continuous one");
  if (d.class_count != 2)
    throw NotBinary("T criterion needs exactly 2 classes, got " +
                    std::to_string(d.class_count));
  const ProjectedGroups g = projected_group_stats(d.x, basis.vectors, d.labels);
  const std::size_t k = basis.vectors.cols();
  Vec scores(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double gap = std::abs(g.means[1][j] - g.means[0][j]);
    const double pooled = g.priors[1] * g.variances[1][j] + g.priors[0] * g.variances[0][j];
    scores[j] = guarded_ratio(gap, std::sqrt(pooled), j, "pooled within-class variance");
  }
  return make_scores(Criterion::T, std::move(scores));
}

CriterionScores score_f(const GevBasis& basis, const LabeledDataset& d,
                        const std::vector<int>& groups) {
  const ProjectedGroups g = projected_group_stats(d.x, basis.vectors, groups);
  const std::size_t hcount = g.priors.size();
  if (hcount < 2) throw SingleClass("F criterion needs at least 2 groups");
  const std::size_t k = basis.vectors.cols();
  Vec scores(k);
  for (std::size_t j = 0; j < k; ++j) {
    double wmean = 0.0;
    for (std::size_t h = 0; h < hcount; ++h) wmean += g.priors[h] * g.means[h][j];
    double between = 0.0;
    double within = 0.0;
    for (std::size_t h = 0; h < hcount; ++h) {
      const double dev = g.means[h][j] - wmean;
      between += g.priors[h] * dev * dev;
      within += g.priors[h] * g.variances[h][j];
    }
    scores[j] = guarded_ratio(between, within, j, "within-group variance");
  }
  return make_scores(Criterion::F, std::move(scores));
}

CriterionScores score_f(const GevBasis& basis, const LabeledDataset& d,
                        const SliceAssignment& slices) {
  return score_f(basis, d, slices.membership);
}

CriterionScores population_delta(const GaussianMixtureSpec& spec, const Matrix& vectors) {
  spec.validate();
  if (spec.h() != 2)
    throw NotBinary("population delta needs exactly 2 components, got " +
                    std::to_string(spec.h()));
  const GaussianComponent& a = spec.components[0];
  const GaussianComponent& b = spec.components[1];
  const Vec gap = b.mean - a.mean;
  const std::size_t k = vectors.cols();
  Vec scores(k);
  for (std::size_t j = 0; j < k; ++j) {
    const Vec v = column(vectors, j);
    const double num = std::abs(dot(v, gap));
    const double den2 = b.weight * quad_form(b.cov.mat(), v) + a.weight * quad_form(a.cov.mat(), v);
    scores[j] = guarded_ratio(num, std::sqrt(den2), j, "weighted population variance");
  }
  return make_scores(Criterion::Delta, std::move(scores));
}

CriterionScores population_psi(const GaussianMixtureSpec& spec, const Matrix& vectors) {
  spec.validate();
  if (spec.h() < 2) throw SingleClass("population psi needs at least 2 components");
  const std::size_t k = vectors.cols();
  Vec scores(k);
  for (std::size_t j = 0; j < k; ++j) {
    const Vec v = column(vectors, j);
    double wmean = 0.0;
    for (const GaussianComponent& c : spec.components) wmean += c.weight * dot(v, c.mean);
    double between = 0.0;
    double within = 0.0;
    for (const GaussianComponent& c : spec.components) {
      const double dev = dot(v, c.mean) - wmean;
      between += c.weight * dev * dev;
      within += c.weight * quad_form(c.cov.mat(), v);
    }
    scores[j] = guarded_ratio(between, within, j, "weighted population variance");
  }
  return make_scores(Criterion::Psi, std::move(scores));
}

ReducedBasis reorder_and_truncate(const GevBasis& basis, const CriterionScores& scores,
                                  std::size_t d, Method method) {
  const std::size_t p = basis.dim;
  if (d < 1 || d > p)
    throw DimensionTooLarge("target dimension " + std::to_string(d) +
                            " must be between 1 and " + std::to_string(p));
  if (scores.scores.size() != p)
    throw ShapeMismatch("scores cover " + std::to_string(scores.scores.size()) +
                        " directions, basis has " + std::to_string(p));
  ReducedBasis out;
  out.method = method;
  out.criterion = scores.criterion;
  out.d = d;
  out.columns = Matrix(p, d);
  out.source_index.reserve(d);
  for (std::size_t k = 0; k < d; ++k) {
    const std::size_t src = scores.permutation[k];
    out.source_index.push_back(src);
    for (std::size_t i = 0; i < p; ++i) out.columns(i, k) = basis.vectors(i, src);
  }
  return out;
}

Matrix project(const ReducedBasis& reduced, const Matrix& x) {
  if (x.cols() != reduced.columns.rows())
    throw ShapeMismatch("data has " + std::to_string(x.cols()) + " columns, basis expects " +
                        std::to_string(reduced.columns.rows()));
  return x * reduced.columns;
}

void write_scores_csv(std::ostream& os, const GevBasis& basis, const CriterionScores& scores) {
  os << "direction_index,eigenvalue,score,rank\n";
  for (std::size_t j = 0; j < scores.scores.size(); ++j) {
    os << (j + 1) << ',' << format_double(basis.values[j]) << ','
       << format_double(scores.scores[j]) << ',' << scores.ranks[j] << '\n';
  }
}

}  // namespace sdr
