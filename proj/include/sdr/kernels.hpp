#pragma once

#include <optional>
#include <string>

#include "sdr/data.hpp"
#include "sdr/linalg.hpp"

namespace sdr {

enum class Method { PCA, SIR, SAVE, SIR2, DR, SSDR };

const char* method_name(Method m);
std::optional<Method> parse_method(const std::string& name);

struct KernelSpec {
  Method method = Method::PCA;
  double gamma = 1e-6;
  int slice_count = 5;      // continuous responses only
  bool force_gamma = false; // also forced automatically when p >= n
};

// One generalized eigenvalue problem M v = lambda N v. m is symmetric PSD by
// construction; n carries the gamma shift when one was needed.
struct KernelPair {
  Matrix m;
  SpdMatrix n;
  double gamma_used = 0.0;
};

// Z-scale group moments shared by the second-moment kernels: S_{Z,h} and
// zbar_h under the whitening W = s_n^{-1/2}, where s_n is the marginal
// covariance after any gamma shift.
struct ZGroupMoments {
  std::vector<Matrix> covs;
  std::vector<Vec> means;
  Matrix sqrt;
  Matrix inv_sqrt;
  SpdMatrix s_n;
  double gamma_used = 0.0;

  ZGroupMoments() : s_n(SpdMatrix::identity(0)) {}
};

ZGroupMoments z_group_moments(const GroupMoments& moments, double gamma, bool force_gamma);

// pooled within-group covariance, N = I
KernelPair kernel_pca(const GroupMoments& moments);
// between-group covariance of means, N = marginal
KernelPair kernel_sir(const GroupMoments& moments, double gamma, bool force_gamma);
// s^{1/2} [ sum pi_h (I - S_{Z,h})^2 ] s^{1/2}, N = s
KernelPair kernel_save(const GroupMoments& moments, const ZGroupMoments& z);
// s^{1/2} [ sum pi_h (S_{Z,h} - Abar)^2 ] s^{1/2}, N = s
KernelPair kernel_sir2(const GroupMoments& moments, const ZGroupMoments& z);
// directional-regression candidate matrix on the Z scale, conjugated back
KernelPair kernel_dr(const GroupMoments& moments, const ZGroupMoments& z);
// C = [ l_2 .. l_H | S_2 - S_1 | .. ], M = C C', N = I
KernelPair kernel_ssdr(const GroupMoments& moments, double gamma, bool force_gamma);

// Groups come from class labels, or from slice_continuous for a continuous
// response; gamma is forced whenever p >= n.
KernelPair build_kernel(const KernelSpec& spec, const LabeledDataset& d);

}  // namespace sdr
