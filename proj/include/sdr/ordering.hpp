#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sdr/data.hpp"
#include "sdr/kernels.hpp"
#include "sdr/linalg.hpp"
#include "sdr/mixture.hpp"

namespace sdr {

enum class Criterion { Eigenvalue, T, F, Delta, Psi };

const char* criterion_name(Criterion c);
std::optional<Criterion> parse_criterion(const std::string& name);

// Per-direction scores with the induced ranking. ranks[j] counts how many
// directions score strictly higher than j, plus one, so ties share a rank.
// permutation[k] is the 0-based column index of the k-th best direction;
// tied ranks keep original column order.
struct CriterionScores {
  Criterion criterion = Criterion::Eigenvalue;
  Vec scores;
  std::vector<int> ranks;
  std::vector<std::size_t> permutation;
};

// r_j = #{i : theta_i > theta_j} + 1
std::vector<int> rank_order(const Vec& theta);

CriterionScores make_scores(Criterion criterion, Vec scores);

// |lambda_j|
CriterionScores score_eigenvalue(const GevBasis& basis);

// Two-class separation per direction: |mean gap| over the prior-weighted
// within-class standard deviation of the projected data. Zero denominator:
// zero gap scores 0, nonzero gap scores +inf; both are noted on stderr.
CriterionScores score_t(const GevBasis& basis, const LabeledDataset& d);

// Multi-group analogue: weighted between-group mean dispersion over weighted
// within-group variance, per direction. Groups are 1-based.
CriterionScores score_f(const GevBasis& basis, const LabeledDataset& d,
                        const std::vector<int>& groups);
CriterionScores score_f(const GevBasis& basis, const LabeledDataset& d,
                        const SliceAssignment& slices);

// Population counterparts evaluated against a known mixture, one score per
// column of vectors.
CriterionScores population_delta(const GaussianMixtureSpec& spec, const Matrix& vectors);
CriterionScores population_psi(const GaussianMixtureSpec& spec, const Matrix& vectors);

// The d selected directions in rank order.
struct ReducedBasis {
  Matrix columns;  // p x d
  Method method = Method::PCA;
  Criterion criterion = Criterion::Eigenvalue;
  std::size_t d = 0;
  std::vector<std::size_t> source_index;  // original column of each kept direction
};

ReducedBasis reorder_and_truncate(const GevBasis& basis, const CriterionScores& scores,
                                  std::size_t d, Method method = Method::PCA);

// x (n x p) times the kept directions -> n x d
Matrix project(const ReducedBasis& reduced, const Matrix& x);

// columns: direction_index, eigenvalue, score, rank (original direction order)
void write_scores_csv(std::ostream& os, const GevBasis& basis, const CriterionScores& scores);

}  // namespace sdr
