#include "sdr/linalg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <system_error>

namespace sdr {

namespace {

constexpr double kSymmetryRelTol = 1e-12;
constexpr double kJacobiStopRelTol = 1e-12;
constexpr int kJacobiMaxSweeps = 100;
constexpr double kGramRankRelTol = 1e-10;

void require(bool ok, const char* what) {
  if (!ok) throw ShapeMismatch(what);
}

double offdiag_frobenius(const Matrix& a) {
  const std::size_t n = a.rows();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
  return std::sqrt(2.0 * s);
}

// Makes the largest-magnitude entry of each column positive so eigenvector
// output is reproducible across runs.
void fix_column_signs(Matrix& v) {
  for (std::size_t j = 0; j < v.cols(); ++j) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < v.rows(); ++i) {
      const double m = std::abs(v(i, j));
      if (m > best) {
        best = m;
        arg = i;
      }
    }
    if (v(arg, j) < 0.0)
      for (std::size_t i = 0; i < v.rows(); ++i) v(i, j) = -v(i, j);
  }
}

}  // namespace

double dot(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), "dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

Vec operator-(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), "vec subtract: length mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec operator+(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), "vec add: length mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec scaled(const Vec& a, double s) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
  return r;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matrix product: inner dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i);
    double* ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = ai[k];
      if (aik == 0.0) continue;
      const double* bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix add: shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] += b.data()[i];
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix subtract: shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] -= b.data()[i];
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix scaled(const Matrix& a, double s) {
  Matrix c = a;
  for (double& v : c.data()) v *= s;
  return c;
}

Vec mat_vec(const Matrix& a, const Vec& x) {
  require(a.cols() == x.size(), "mat_vec: dimension mismatch");
  Vec r(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += ai[j] * x[j];
    r[i] = s;
  }
  return r;
}

Vec tmat_vec(const Matrix& a, const Vec& x) {
  require(a.rows() == x.size(), "tmat_vec: dimension mismatch");
  Vec r(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i);
    const double xi = x[i];
    for (std::size_t j = 0; j < a.cols(); ++j) r[j] += ai[j] * xi;
  }
  return r;
}

Matrix outer(const Vec& u, const Vec& v) {
  Matrix c(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) c(i, j) = u[i] * v[j];
  return c;
}

Matrix matrix_from_column(const Vec& u) {
  Matrix c(u.size(), 1);
  for (std::size_t i = 0; i < u.size(); ++i) c(i, 0) = u[i];
  return c;
}

Vec column(const Matrix& a, std::size_t j) {
  Vec u(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) u[i] = a(i, j);
  return u;
}

void set_column(Matrix& a, std::size_t j, const Vec& u) {
  require(a.rows() == u.size(), "set_column: length mismatch");
  for (std::size_t i = 0; i < a.rows(); ++i) a(i, j) = u[i];
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

bool is_symmetric(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(max_abs(a), 1e-300);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > rel_tol * scale) return false;
  return true;
}

Matrix symmetrized(const Matrix& a) {
  require(a.rows() == a.cols(), "symmetrized: matrix not square");
  Matrix s = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  return s;
}

SpdMatrix::SpdMatrix(Matrix m) {
  if (m.rows() != m.cols()) throw ShapeMismatch("SpdMatrix: matrix not square");
  if (!is_symmetric(m, kSymmetryRelTol))
    throw ShapeMismatch("SpdMatrix: matrix not symmetric within 1e-12 relative tolerance");
  m_ = symmetrized(m);
}

Matrix cholesky(const SpdMatrix& a) {
  const std::size_t n = a.dim();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0))
      throw NotPositiveDefinite("cholesky: nonpositive pivot at index " + std::to_string(j));
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

EigResult sym_eig(const Matrix& a_in) {
  if (a_in.rows() != a_in.cols()) throw ShapeMismatch("sym_eig: matrix not square");
  if (!is_symmetric(a_in, 1e-8))
    throw ShapeMismatch("sym_eig: matrix not symmetric within 1e-8 relative tolerance");

  const std::size_t n = a_in.rows();
  Matrix a = symmetrized(a_in);
  Matrix v = Matrix::identity(n);
  const double fro = frobenius_norm(a);
  const double stop = kJacobiStopRelTol * fro;

  bool converged = fro == 0.0 || n < 2;
  for (int sweep = 0; !converged && sweep < kJacobiMaxSweeps; ++sweep) {
    if (offdiag_frobenius(a) <= stop) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e10) {
          t = 1.0 / (2.0 * theta);
        } else {
          t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        const double app = a(p, p);
        const double aqq = a(q, q);
        a(p, p) = c * c * app - 2.0 * s * c * apq + s * s * aqq;
        a(q, q) = s * s * app + 2.0 * s * c * apq + c * c * aqq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(p, k) = a(k, p);
          a(k, q) = s * akp + c * akq;
          a(q, k) = a(k, q);
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged && offdiag_frobenius(a) > stop)
    throw NoConvergence("sym_eig: cyclic Jacobi did not converge in " +
                        std::to_string(kJacobiMaxSweeps) + " sweeps");

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigResult out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(idx[j], idx[j]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, idx[j]);
  }
  fix_column_signs(out.vectors);
  return out;
}

GevBasis gev_solve(const Matrix& m, const SpdMatrix& n) {
  if (m.rows() != m.cols()) throw ShapeMismatch("gev_solve: m not square");
  if (m.rows() != n.dim()) throw ShapeMismatch("gev_solve: m and n dimension mismatch");
  if (!is_symmetric(m, 1e-8))
    throw ShapeMismatch("gev_solve: m not symmetric within 1e-8 relative tolerance");

  const std::size_t p = m.rows();
  const Matrix l = cholesky(n);
  // c = L^{-1} m L^{-T}, formed as L^{-1} (L^{-1} m)'
  const Matrix x = forward_solve(l, symmetrized(m));
  Matrix c = forward_solve(l, transpose(x));
  c = symmetrized(c);

  const EigResult eig = sym_eig(c);

  GevBasis basis;
  basis.dim = p;
  basis.values = eig.values;
  basis.vectors = Matrix(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    const Vec vj = backward_solve_transposed(l, column(eig.vectors, j));
    set_column(basis.vectors, j, vj);
  }
  fix_column_signs(basis.vectors);
  basis.normalization = BasisNormalization::NOrthonormal;
  return basis;
}

Matrix spd_inverse(const SpdMatrix& a) {
  const std::size_t n = a.dim();
  const Matrix l = cholesky(a);
  const Matrix y = forward_solve(l, Matrix::identity(n));
  // L' X = Y, column by column
  Matrix x(n, n);
  for (std::size_t j = 0; j < n; ++j)
    set_column(x, j, backward_solve_transposed(l, column(y, j)));
  return symmetrized(x);
}

SqrtPair spd_sqrt_and_invsqrt(const SpdMatrix& a) {
  const EigResult eig = sym_eig(a.mat());
  const std::size_t n = a.dim();
  if (n > 0 && eig.values.back() <= 0.0)
    throw NotPositiveDefinite("spd_sqrt_and_invsqrt: nonpositive eigenvalue " +
                              format_double(eig.values.back()));
  Matrix s(n, n), si(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double vs = 0.0, vi = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double r = std::sqrt(eig.values[k]);
        const double w = eig.vectors(i, k) * eig.vectors(j, k);
        vs += w * r;
        vi += w / r;
      }
      s(i, j) = s(j, i) = vs;
      si(i, j) = si(j, i) = vi;
    }
  }
  return {s, si};
}

SpdMatrix regularize(const Matrix& a, double gamma) {
  if (a.rows() != a.cols()) throw ShapeMismatch("regularize: matrix not square");
  if (gamma < 0.0) throw ConfigError("regularize: gamma must be nonnegative");
  Matrix r = symmetrized(a);
  for (std::size_t i = 0; i < r.rows(); ++i) r(i, i) += gamma;
  SpdMatrix out(r);
  try {
    cholesky(out);
  } catch (const NotPositiveDefinite&) {
    throw StillSingular("regularize: matrix not positive definite after gamma = " +
                        format_double(gamma));
  }
  return out;
}

SpdMatrix ensure_spd(const Matrix& a, double gamma, bool force, double* gamma_used) {
  if (gamma_used != nullptr) *gamma_used = 0.0;
  if (!force) {
    try {
      SpdMatrix plain{symmetrized(a)};
      cholesky(plain);
      return plain;
    } catch (const NotPositiveDefinite&) {
      // fall through to the shifted version
    }
  }
  if (gamma_used != nullptr) *gamma_used = gamma;
  return regularize(a, gamma);
}

Matrix projection_matrix(const Matrix& b) {
  if (b.rows() == 0 || b.cols() == 0) throw ShapeMismatch("projection_matrix: empty basis");
  const Matrix gram = transpose(b) * b;
  const EigResult eig = sym_eig(gram);
  const double top = eig.values.front();
  if (!(top > 0.0) || eig.values.back() < kGramRankRelTol * top)
    throw RankDeficient("projection_matrix: basis columns are rank deficient");
  // gram^{-1} = Q diag(1/lambda) Q'
  const std::size_t d = gram.rows();
  Matrix ginv(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k)
        s += eig.vectors(i, k) * eig.vectors(j, k) / eig.values[k];
      ginv(i, j) = ginv(j, i) = s;
    }
  return symmetrized(b * ginv * transpose(b));
}

Matrix orthonormal_basis(const Matrix& cols, double rel_tol) {
  const std::size_t p = cols.rows();
  std::vector<Vec> kept;
  for (std::size_t j = 0; j < cols.cols(); ++j) {
    Vec w = column(cols, j);
    const double orig = norm2(w);
    if (orig <= 1e-300) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& q : kept) {
        const double c = dot(w, q);
        for (std::size_t i = 0; i < p; ++i) w[i] -= c * q[i];
      }
    const double res = norm2(w);
    if (res > rel_tol * orig) kept.push_back(scaled(w, 1.0 / res));
  }
  Matrix out(p, kept.size());
  for (std::size_t j = 0; j < kept.size(); ++j) set_column(out, j, kept[j]);
  return out;
}

Vec forward_solve(const Matrix& lower, const Vec& b) {
  const std::size_t n = lower.rows();
  require(lower.cols() == n && b.size() == n, "forward_solve: shape mismatch");
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    const double* li = lower.row(i);
    for (std::size_t k = 0; k < i; ++k) s -= li[k] * x[k];
    x[i] = s / li[i];
  }
  return x;
}

Vec backward_solve_transposed(const Matrix& lower, const Vec& b) {
  const std::size_t n = lower.rows();
  require(lower.cols() == n && b.size() == n, "backward_solve_transposed: shape mismatch");
  Vec x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= lower(k, ii) * x[k];
    x[ii] = s / lower(ii, ii);
  }
  return x;
}

Matrix forward_solve(const Matrix& lower, const Matrix& b) {
  const std::size_t n = lower.rows();
  require(lower.cols() == n && b.rows() == n, "forward_solve: shape mismatch");
  Matrix x(n, b.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const double* li = lower.row(i);
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = b(i, j);
      for (std::size_t k = 0; k < i; ++k) s -= li[k] * x(k, j);
      x(i, j) = s / li[i];
    }
  }
  return x;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& field, std::size_t row, std::size_t col) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
  if (begin == end)
    throw MissingValue("empty numeric field at row " + std::to_string(row) + ", column " +
                       std::to_string(col));
  double value = 0.0;
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end)
    throw ParseError("cannot parse '" + std::string(begin, end) + "' as a number at row " +
                     std::to_string(row) + ", column " + std::to_string(col));
  return value;
}

void write_matrix_csv(std::ostream& os, const Matrix& a) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j > 0) os << ',';
      os << format_double(a(i, j));
    }
    os << '\n';
  }
}

Matrix read_matrix_csv(std::istream& is) {
  std::vector<Vec> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Vec row;
    std::size_t start = 0;
    std::size_t col = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string field = line.substr(start, comma == std::string::npos
                                                       ? std::string::npos
                                                       : comma - start);
      row.push_back(parse_double(field, lineno, ++col));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("ragged row at line " + std::to_string(lineno));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptyInput("matrix csv has no rows");
  Matrix a(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j) a(i, j) = rows[i][j];
  return a;
}

void write_matrix_csv_file(const std::string& path, const Matrix& a) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  write_matrix_csv(os, a);
  if (!os.good()) throw IoError("write failed: " + path);
}

Matrix read_matrix_csv_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path);
  return read_matrix_csv(is);
}

}  // namespace sdr
