#include "sdr/data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace sdr {

namespace {

std::string trimmed(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

// Full-record CSV scan: quotes may wrap commas, newlines, and doubled quotes.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string cur;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    fields.push_back(cur);
    cur.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // a record that is a single empty field is a blank line
    if (fields.size() != 1 || !fields.front().empty()) records.push_back(fields);
    fields.clear();
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cur += '"';
          i += 2;
          continue;
        }
        in_quotes = false;
        ++i;
        continue;
      }
      cur += c;
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        ++i;
        break;
      case ',':
        end_field();
        ++i;
        break;
      case '\r':
        ++i;
        if (i < text.size() && text[i] == '\n') ++i;
        end_record();
        break;
      case '\n':
        ++i;
        end_record();
        break;
      default:
        cur += c;
        field_started = true;
        ++i;
        break;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field at end of file");
  if (field_started || !cur.empty() || !fields.empty()) end_record();
  return records;
}

bool parse_int_exact(const std::string& s, long& out) {
  const std::string t = trimmed(s);
  if (t.empty()) return false;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  return res.ec == std::errc() && res.ptr == t.data() + t.size();
}

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string csv_escaped(const std::string& s) {
  if (!needs_quoting(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

}  // namespace

const char* response_kind_name(ResponseKind kind) {
  switch (kind) {
    case ResponseKind::Binary: return "binary";
    case ResponseKind::Categorical: return "categorical";
    case ResponseKind::Continuous: return "continuous";
  }
  return "?";
}

ResponseKind parse_response_kind(const std::string& name) {
  if (name == "binary") return ResponseKind::Binary;
  if (name == "categorical") return ResponseKind::Categorical;
  if (name == "continuous") return ResponseKind::Continuous;
  throw ConfigError("unknown response kind '" + name +
                    "' (expected binary, categorical, or continuous)");
}

LabeledDataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path);
  std::stringstream buffer;
  buffer << is.rdbuf();
  auto records = parse_csv(buffer.str());
  if (records.empty()) throw ParseError(path + ": no rows");

  std::vector<std::string> header;
  std::size_t first_data = 0;
  if (schema.has_header) {
    header = records.front();
    first_data = 1;
  }
  if (records.size() <= first_data) throw ParseError(path + ": no data rows");

  const std::size_t ncol = records[first_data].size();
  if (ncol < 2) throw ParseError(path + ": need at least one predictor and a response column");

  std::size_t resp_idx;
  if (!schema.response_name.empty()) {
    if (!schema.has_header)
      throw ConfigError("response column requested by name but the file has no header");
    const auto it = std::find(header.begin(), header.end(), schema.response_name);
    if (it == header.end())
      throw ParseError(path + ": response column '" + schema.response_name + "' not in header");
    resp_idx = static_cast<std::size_t>(it - header.begin());
  } else if (schema.response_column >= 0) {
    resp_idx = static_cast<std::size_t>(schema.response_column);
    if (resp_idx >= ncol) throw ConfigError("response column index out of range");
  } else {
    resp_idx = ncol - 1;
  }

  const std::size_t n = records.size() - first_data;
  const std::size_t p = ncol - 1;

  LabeledDataset d;
  d.kind = schema.kind;
  d.x = Matrix(n, p);

  std::vector<std::string> raw_labels;
  raw_labels.reserve(schema.kind == ResponseKind::Continuous ? 0 : n);
  if (schema.kind == ResponseKind::Continuous) d.y.resize(n);

  for (std::size_t r = 0; r < n; ++r) {
    const auto& rec = records[first_data + r];
    // error locations count physical file rows, header included
    const std::size_t file_row = first_data + r + 1;
    if (rec.size() != ncol)
      throw ParseError(path + ": row " + std::to_string(file_row) + " has " +
                       std::to_string(rec.size()) + " fields, expected " + std::to_string(ncol));
    std::size_t xj = 0;
    for (std::size_t cidx = 0; cidx < ncol; ++cidx) {
      if (cidx == resp_idx) continue;
      d.x(r, xj++) = parse_double(rec[cidx], file_row, cidx + 1);
    }
    if (schema.kind == ResponseKind::Continuous) {
      d.y[r] = parse_double(rec[resp_idx], file_row, resp_idx + 1);
    } else {
      const std::string label = trimmed(rec[resp_idx]);
      if (label.empty())
        throw MissingValue("empty response at row " + std::to_string(file_row) + ", column " +
                           std::to_string(resp_idx + 1));
      raw_labels.push_back(label);
    }
  }

  if (schema.kind != ResponseKind::Continuous) {
    // Integer labels forming exactly {1..H} pass through unchanged; anything
    // else maps in first-appearance order.
    bool all_int = true;
    std::set<long> distinct_ints;
    std::vector<long> as_int(n);
    for (std::size_t r = 0; r < n && all_int; ++r) {
      long v = 0;
      if (parse_int_exact(raw_labels[r], v)) {
        as_int[r] = v;
        distinct_ints.insert(v);
      } else {
        all_int = false;
      }
    }
    bool verbatim = all_int && !distinct_ints.empty() && *distinct_ints.begin() == 1 &&
                    *distinct_ints.rbegin() == static_cast<long>(distinct_ints.size());
    d.labels.resize(n);
    if (verbatim) {
      for (std::size_t r = 0; r < n; ++r) d.labels[r] = static_cast<int>(as_int[r]);
      d.class_count = static_cast<int>(distinct_ints.size());
    } else {
      for (std::size_t r = 0; r < n; ++r) {
        const auto it = std::find(d.class_names.begin(), d.class_names.end(), raw_labels[r]);
        if (it == d.class_names.end()) {
          d.class_names.push_back(raw_labels[r]);
          d.labels[r] = static_cast<int>(d.class_names.size());
        } else {
          d.labels[r] = static_cast<int>(it - d.class_names.begin()) + 1;
        }
      }
      d.class_count = static_cast<int>(d.class_names.size());
    }
    if (d.class_count < 2)
      throw SingleClassResponse(path + ": response has a single class");
    if (schema.kind == ResponseKind::Binary && d.class_count != 2)
      throw NotBinary(path + ": binary response requested but found " +
                      std::to_string(d.class_count) + " classes");
  }
  return d;
}

void save_csv(const LabeledDataset& d, const std::string& path, bool with_header) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  if (with_header) {
    for (std::size_t j = 0; j < d.p(); ++j) os << 'x' << (j + 1) << ',';
    os << "y\n";
  }
  for (std::size_t i = 0; i < d.n(); ++i) {
    for (std::size_t j = 0; j < d.p(); ++j) os << format_double(d.x(i, j)) << ',';
    if (d.kind == ResponseKind::Continuous) {
      os << format_double(d.y[i]);
    } else if (d.class_names.empty()) {
      os << d.labels[i];
    } else {
      os << csv_escaped(d.class_names[d.labels[i] - 1]);
    }
    os << '\n';
  }
  if (!os.good()) throw IoError("write failed: " + path);
}

SliceAssignment slice_continuous(const Vec& y, int h) {
  if (h < 2) throw ConfigError("slice count must be at least 2");
  const std::size_t n = y.size();
  const std::size_t hh = static_cast<std::size_t>(h);
  if (n < 2 * hh)
    throw TooFewObservations("slicing needs at least 2 observations per slice: n = " +
                             std::to_string(n) + ", H = " + std::to_string(h));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (y[a] != y[b]) return y[a] < y[b];
    return a < b;
  });

  std::size_t distinct = n == 0 ? 0 : 1;
  for (std::size_t i = 1; i < n; ++i)
    if (y[order[i]] != y[order[i - 1]]) ++distinct;
  if (distinct < hh)
    throw DegenerateResponse("response has " + std::to_string(distinct) +
                             " distinct values, fewer than H = " + std::to_string(h));

  // provisional equal-frequency cuts, then ties pushed into the lower slice
  std::vector<std::size_t> cuts(hh + 1);
  for (std::size_t k = 0; k <= hh; ++k) cuts[k] = k * n / hh;
  for (std::size_t k = 1; k < hh; ++k) {
    cuts[k] = std::max(cuts[k], cuts[k - 1]);
    while (cuts[k] > 0 && cuts[k] < n && y[order[cuts[k]]] == y[order[cuts[k] - 1]]) ++cuts[k];
  }

  SliceAssignment out;
  out.slice_count = h;
  out.membership.assign(n, 0);
  for (std::size_t k = 0; k < hh; ++k) {
    const std::size_t lo = cuts[k];
    const std::size_t hi = std::max(cuts[k + 1], lo);
    if (hi - lo < 2)
      throw DegenerateResponse("slice " + std::to_string(k + 1) +
                               " has fewer than 2 observations after tie assignment");
    for (std::size_t i = lo; i < hi; ++i) out.membership[order[i]] = static_cast<int>(k + 1);
  }
  out.boundaries.resize(hh - 1);
  for (std::size_t k = 1; k < hh; ++k) out.boundaries[k - 1] = y[order[cuts[k]]];
  return out;
}

GroupMoments group_moments(const Matrix& x, const std::vector<int>& groups) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (groups.size() != n) throw ShapeMismatch("group_moments: groups length != row count");
  if (n < 2) throw GroupTooSmall("group_moments: need at least 2 observations");

  int hmax = 0;
  for (int g : groups) {
    if (g < 1) throw ShapeMismatch("group_moments: group indices must be 1-based");
    hmax = std::max(hmax, g);
  }
  const std::size_t hh = static_cast<std::size_t>(hmax);

  GroupMoments m;
  m.n_total = n;
  m.counts.assign(hh, 0);
  for (int g : groups) ++m.counts[static_cast<std::size_t>(g - 1)];
  for (std::size_t hgroup = 0; hgroup < hh; ++hgroup)
    if (m.counts[hgroup] < 2)
      throw GroupTooSmall("group " + std::to_string(hgroup + 1) + " has " +
                          std::to_string(m.counts[hgroup]) + " observations, need at least 2");

  m.priors.resize(hh);
  m.means.assign(hh, Vec(p, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t g = static_cast<std::size_t>(groups[i] - 1);
    const double* xi = x.row(i);
    for (std::size_t j = 0; j < p; ++j) m.means[g][j] += xi[j];
  }
  for (std::size_t g = 0; g < hh; ++g) {
    m.priors[g] = static_cast<double>(m.counts[g]) / static_cast<double>(n);
    for (std::size_t j = 0; j < p; ++j) m.means[g][j] /= static_cast<double>(m.counts[g]);
  }

  m.grand_mean.assign(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x.row(i);
    for (std::size_t j = 0; j < p; ++j) m.grand_mean[j] += xi[j];
  }
  for (std::size_t j = 0; j < p; ++j) m.grand_mean[j] /= static_cast<double>(n);

  m.covs.assign(hh, Matrix(p, p));
  Matrix marg(p, p);
  Vec dev(p), gdev(p);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t g = static_cast<std::size_t>(groups[i] - 1);
    const double* xi = x.row(i);
    for (std::size_t j = 0; j < p; ++j) {
      dev[j] = xi[j] - m.means[g][j];
      gdev[j] = xi[j] - m.grand_mean[j];
    }
    Matrix& cg = m.covs[g];
    for (std::size_t a = 0; a < p; ++a) {
      const double da = dev[a];
      const double ga = gdev[a];
      double* cga = cg.row(a);
      double* ma = marg.row(a);
      for (std::size_t b = a; b < p; ++b) {
        cga[b] += da * dev[b];
        ma[b] += ga * gdev[b];
      }
    }
  }
  for (std::size_t g = 0; g < hh; ++g) {
    const double div = static_cast<double>(m.counts[g] - 1);
    Matrix& cg = m.covs[g];
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = a; b < p; ++b) {
        cg(a, b) /= div;
        cg(b, a) = cg(a, b);
      }
  }
  const double mdiv = static_cast<double>(n - 1);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = a; b < p; ++b) {
      marg(a, b) /= mdiv;
      marg(b, a) = marg(a, b);
    }
  m.marginal = marg;

  m.pooled = Matrix(p, p);
  for (std::size_t g = 0; g < hh; ++g) {
    const double w = m.priors[g];
    for (std::size_t k = 0; k < p * p; ++k) m.pooled.data()[k] += w * m.covs[g].data()[k];
  }
  return m;
}

Matrix standardize(const Matrix& x, const SpdMatrix& sx) {
  if (x.cols() != sx.dim()) throw ShapeMismatch("standardize: dimension mismatch");
  const Matrix w = spd_sqrt_and_invsqrt(sx).inv_sqrt;
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  Vec mean(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x.row(i);
    for (std::size_t j = 0; j < p; ++j) mean[j] += xi[j];
  }
  for (std::size_t j = 0; j < p; ++j) mean[j] /= static_cast<double>(n);
  Matrix dev(n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) dev(i, j) = x(i, j) - mean[j];
  return dev * w;  // w symmetric, so rows become w (x_i - mean)
}

}  // namespace sdr
