#include "sdr/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace sdr {

namespace {

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

// fixed two decimals for geometry so the bytes are stable
std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

void write_replicates(const std::string& path, const std::vector<ReplicateResult>& rows) {
  std::ofstream out = open_or_throw(path);
  out << "replicate,n,method,criterion,metric,value,baseline\n";
  for (const ReplicateResult& r : rows) {
    out << r.replicate << ',' << r.n << ',' << r.method << ',' << r.criterion << ','
        << r.metric << ',' << format_double(r.value) << ',';
    if (!std::isnan(r.baseline)) out << format_double(r.baseline);
    out << '\n';
  }
}

void write_summary(const std::string& path, const std::vector<SummaryRow>& summary) {
  std::ofstream out = open_or_throw(path);
  out << "method,criterion,n,metric,count,min,q25,median,q75,max\n";
  for (const SummaryRow& s : summary) {
    out << s.method << ',' << s.criterion << ',' << s.n << ',' << s.metric << ',' << s.count
        << ',' << format_double(s.min) << ',' << format_double(s.q25) << ','
        << format_double(s.median) << ',' << format_double(s.q75) << ','
        << format_double(s.max) << '\n';
  }
}

void write_boxplot(const std::string& path, const std::vector<SummaryRow>& summary) {
  const double box_w = 34.0;
  const double slot_w = 72.0;
  const double margin_left = 70.0;
  const double margin_right = 30.0;
  const double top = 40.0;
  const double plot_h = 320.0;
  const double label_h = 100.0;
  const double width = margin_left + slot_w * static_cast<double>(summary.size()) + margin_right;
  const double height = top + plot_h + label_h;

  double lo = summary.front().min;
  double hi = summary.front().max;
  for (const SummaryRow& s : summary) {
    lo = std::min(lo, s.min);
    hi = std::max(hi, s.max);
  }
  double pad = 0.05 * (hi - lo);
  if (pad <= 0.0) pad = 0.05;
  lo -= pad;
  hi += pad;
  const auto y = [&](double v) { return top + (hi - v) / (hi - lo) * plot_h; };

  std::ofstream out = open_or_throw(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(width) << "\" height=\""
      << px(height) << "\" font-family=\"sans-serif\">\n";
  out << "<text x=\"" << px(margin_left) << "\" y=\"22\" font-size=\"14\">" << summary.front().metric
      << " by method, criterion, and n</text>\n";

  // y axis with 5 ticks
  out << "<line x1=\"" << px(margin_left - 10.0) << "\" y1=\"" << px(top) << "\" x2=\""
      << px(margin_left - 10.0) << "\" y2=\"" << px(top + plot_h)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * static_cast<double>(t) / 4.0;
    out << "<line x1=\"" << px(margin_left - 14.0) << "\" y1=\"" << px(y(v)) << "\" x2=\""
        << px(margin_left - 10.0) << "\" y2=\"" << px(y(v))
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << px(margin_left - 18.0) << "\" y=\"" << px(y(v) + 4.0)
        << "\" font-size=\"10\" text-anchor=\"end\">" << tick_label(v) << "</text>\n";
  }

  for (std::size_t i = 0; i < summary.size(); ++i) {
    const SummaryRow& s = summary[i];
    const double cx = margin_left + slot_w * (static_cast<double>(i) + 0.5);
    const double x0 = cx - box_w / 2.0;
    // whiskers with caps
    out << "<line x1=\"" << px(cx) << "\" y1=\"" << px(y(s.max)) << "\" x2=\"" << px(cx)
        << "\" y2=\"" << px(y(s.q75)) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << px(cx) << "\" y1=\"" << px(y(s.q25)) << "\" x2=\"" << px(cx)
        << "\" y2=\"" << px(y(s.min)) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << px(cx - box_w / 4.0) << "\" y1=\"" << px(y(s.max)) << "\" x2=\""
        << px(cx + box_w / 4.0) << "\" y2=\"" << px(y(s.max))
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << px(cx - box_w / 4.0) << "\" y1=\"" << px(y(s.min)) << "\" x2=\""
        << px(cx + box_w / 4.0) << "\" y2=\"" << px(y(s.min))
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<rect class=\"box\" x=\"" << px(x0) << "\" y=\"" << px(y(s.q75)) << "\" width=\""
        << px(box_w) << "\" height=\"" << px(std::max(0.0, y(s.q25) - y(s.q75)))
        << "\" fill=\"#cfe2f3\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << px(x0) << "\" y1=\"" << px(y(s.median)) << "\" x2=\""
        << px(x0 + box_w) << "\" y2=\"" << px(y(s.median))
        << "\" stroke=\"black\" stroke-width=\"2\"/>\n";

    std::string label = s.method;
    if (s.criterion != "NONE") label += "_" + s.criterion;
    label += "@" + std::to_string(s.n);
    const double ly = top + plot_h + 16.0;
    out << "<text x=\"" << px(cx) << "\" y=\"" << px(ly) << "\" font-size=\"10\" transform=\"rotate(-40 "
        << px(cx) << ' ' << px(ly) << ")\" text-anchor=\"end\">" << label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace

void emit_outputs(const std::vector<ReplicateResult>& rows,
                  const std::vector<SummaryRow>& summary, const std::string& dir,
                  const std::string& config_json) {
  if (dir.empty()) throw IoError("output directory path is empty");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  write_replicates(dir + "/replicates.csv", rows);
  const std::vector<SummaryRow>* table = &summary;
  std::vector<SummaryRow> computed;
  if (summary.empty() && !rows.empty()) {
    computed = summarize(rows);
    table = &computed;
  }
  write_summary(dir + "/summary.csv", *table);
  {
    std::ofstream out = open_or_throw(dir + "/config.json");
    out << config_json << '\n';
  }
  if (!table->empty()) write_boxplot(dir + "/boxplot.svg", *table);
}

}  // namespace sdr
