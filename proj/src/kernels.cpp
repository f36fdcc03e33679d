#include "sdr/kernels.hpp"

#include <cmath>

namespace sdr {

namespace {

Matrix weighted_square_sum(const std::vector<Matrix>& terms, const Vec& weights) {
  // sum_h w_h terms[h]^2 with symmetric terms
  const std::size_t p = terms.front().rows();
  Matrix acc(p, p);
  for (std::size_t h = 0; h < terms.size(); ++h) {
    const Matrix sq = terms[h] * terms[h];
    const double w = weights[h];
    for (std::size_t k = 0; k < p * p; ++k) acc.data()[k] += w * sq.data()[k];
  }
  return acc;
}

Matrix conjugate(const Matrix& s, const Matrix& inner) { return symmetrized(s * inner * s); }

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::PCA: return "PCA";
    case Method::SIR: return "SIR";
    case Method::SAVE: return "SAVE";
    case Method::SIR2: return "SIR2";
    case Method::DR: return "DR";
    case Method::SSDR: return "SSDR";
  }
  return "?";
}

std::optional<Method> parse_method(const std::string& name) {
  if (name == "PCA" || name == "pca") return Method::PCA;
  if (name == "SIR" || name == "sir") return Method::SIR;
  if (name == "SAVE" || name == "save") return Method::SAVE;
  if (name == "SIR2" || name == "sir2" || name == "SIR-II") return Method::SIR2;
  if (name == "DR" || name == "dr") return Method::DR;
  if (name == "SSDR" || name == "ssdr") return Method::SSDR;
  return std::nullopt;
}

ZGroupMoments z_group_moments(const GroupMoments& moments, double gamma, bool force_gamma) {
  ZGroupMoments z;
  z.s_n = ensure_spd(moments.marginal, gamma, force_gamma, &z.gamma_used);
  const SqrtPair roots = spd_sqrt_and_invsqrt(z.s_n);
  z.sqrt = roots.sqrt;
  z.inv_sqrt = roots.inv_sqrt;
  const std::size_t hcount = moments.counts.size();
  z.covs.reserve(hcount);
  z.means.reserve(hcount);
  for (std::size_t h = 0; h < hcount; ++h) {
    z.covs.push_back(conjugate(z.inv_sqrt, moments.covs[h]));
    z.means.push_back(mat_vec(z.inv_sqrt, moments.means[h] - moments.grand_mean));
  }
  return z;
}

KernelPair kernel_pca(const GroupMoments& moments) {
  // predictor covariance with the between-group mean spread removed
  return {symmetrized(moments.pooled), SpdMatrix::identity(moments.pooled.rows()), 0.0};
}

KernelPair kernel_sir(const GroupMoments& moments, double gamma, bool force_gamma) {
  const std::size_t p = moments.grand_mean.size();
  Matrix m(p, p);
  for (std::size_t h = 0; h < moments.counts.size(); ++h) {
    const Vec dev = moments.means[h] - moments.grand_mean;
    const double w = moments.priors[h];
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b) m(a, b) += w * dev[a] * dev[b];
  }
  double used = 0.0;
  SpdMatrix n = ensure_spd(moments.marginal, gamma, force_gamma, &used);
  return {symmetrized(m), n, used};
}

KernelPair kernel_save(const GroupMoments& moments, const ZGroupMoments& z) {
  const std::size_t p = moments.grand_mean.size();
  const Matrix eye = Matrix::identity(p);
  std::vector<Matrix> terms;
  terms.reserve(z.covs.size());
  for (const Matrix& szh : z.covs) terms.push_back(eye - szh);
  const Matrix mz = weighted_square_sum(terms, moments.priors);
  return {conjugate(z.sqrt, mz), z.s_n, z.gamma_used};
}

KernelPair kernel_sir2(const GroupMoments& moments, const ZGroupMoments& z) {
  const std::size_t p = moments.grand_mean.size();
  Matrix abar(p, p);
  for (std::size_t h = 0; h < z.covs.size(); ++h) {
    const double w = moments.priors[h];
    for (std::size_t k = 0; k < p * p; ++k) abar.data()[k] += w * z.covs[h].data()[k];
  }
  std::vector<Matrix> terms;
  terms.reserve(z.covs.size());
  for (const Matrix& szh : z.covs) terms.push_back(szh - abar);
  const Matrix mz = weighted_square_sum(terms, moments.priors);
  return {conjugate(z.sqrt, mz), z.s_n, z.gamma_used};
}

KernelPair kernel_dr(const GroupMoments& moments, const ZGroupMoments& z) {
  const std::size_t p = moments.grand_mean.size();
  const double n = static_cast<double>(moments.n_total);
  // kappa restores the in-sample identity sum_h pi_h A_h = I, which keeps the
  // candidate matrix PSD instead of only asymptotically so
  const double kappa = n / (n - 1.0);

  std::vector<Matrix> a_terms;
  a_terms.reserve(z.covs.size());
  Matrix bmat(p, p);
  double csum = 0.0;
  for (std::size_t h = 0; h < z.covs.size(); ++h) {
    const double nh = static_cast<double>(moments.counts[h]);
    const Vec& zb = z.means[h];
    Matrix ah = scaled(z.covs[h], kappa * (nh - 1.0) / nh);
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b) ah(a, b) += kappa * zb[a] * zb[b];
    a_terms.push_back(std::move(ah));

    const double w = moments.priors[h];
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b) bmat(a, b) += w * zb[a] * zb[b];
    csum += w * dot(zb, zb);
  }

  Matrix mz = scaled(weighted_square_sum(a_terms, moments.priors), 2.0);
  const Matrix b2 = bmat * bmat;
  for (std::size_t k = 0; k < p * p; ++k)
    mz.data()[k] += 2.0 * b2.data()[k] + 2.0 * csum * bmat.data()[k];
  for (std::size_t i = 0; i < p; ++i) mz(i, i) -= 2.0;

  return {conjugate(z.sqrt, symmetrized(mz)), z.s_n, z.gamma_used};
}

KernelPair kernel_ssdr(const GroupMoments& moments, double gamma, bool force_gamma) {
  const std::size_t p = moments.grand_mean.size();
  const std::size_t hcount = moments.counts.size();
  if (hcount < 2) throw GroupTooSmall("SSDR needs at least two groups");

  double used_max = 0.0;
  std::vector<Vec> whitened_means(hcount);
  for (std::size_t h = 0; h < hcount; ++h) {
    double used = 0.0;
    const SpdMatrix sh = ensure_spd(moments.covs[h], gamma, force_gamma, &used);
    used_max = std::max(used_max, used);
    whitened_means[h] = mat_vec(spd_inverse(sh), moments.means[h]);
  }

  Matrix m(p, p);
  for (std::size_t h = 1; h < hcount; ++h) {
    const Vec l = whitened_means[h] - whitened_means[0];
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b) m(a, b) += l[a] * l[b];
    const Matrix ds = moments.covs[h] - moments.covs[0];
    const Matrix sq = ds * transpose(ds);
    for (std::size_t k = 0; k < p * p; ++k) m.data()[k] += sq.data()[k];
  }
  return {symmetrized(m), SpdMatrix::identity(p), used_max};
}

KernelPair build_kernel(const KernelSpec& spec, const LabeledDataset& d) {
  std::vector<int> groups;
  if (d.kind == ResponseKind::Continuous) {
    groups = slice_continuous(d.y, spec.slice_count).membership;
  } else {
    groups = d.labels;
  }
  const GroupMoments moments = group_moments(d.x, groups);
  const bool force = spec.force_gamma || d.p() >= d.n();
  switch (spec.method) {
    case Method::PCA:
      return kernel_pca(moments);
    case Method::SIR:
      return kernel_sir(moments, spec.gamma, force);
    case Method::SAVE:
      return kernel_save(moments, z_group_moments(moments, spec.gamma, force));
    case Method::SIR2:
      return kernel_sir2(moments, z_group_moments(moments, spec.gamma, force));
    case Method::DR:
      return kernel_dr(moments, z_group_moments(moments, spec.gamma, force));
    case Method::SSDR:
      return kernel_ssdr(moments, spec.gamma, force);
  }
  throw ConfigError("unknown method");
}

}  // namespace sdr
