#include "dtmi/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace dtmi {

CorrelationReport pearson(const std::vector<double>& a, const std::vector<double>& b,
                          const std::string& name_a, const std::string& name_b) {
  if (a.size() != b.size()) {
    throw validation_error("LengthMismatch", "series lengths differ");
  }
  if (a.size() < 3) throw validation_error("LengthMismatch", "need >= 3 points");
  const double n = static_cast<double>(a.size());
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) {
    throw validation_error("ConstantSeries", "a constant series has no correlation");
  }
  CorrelationReport report;
  report.r = sab / std::sqrt(saa * sbb);
  report.n_points = a.size();
  report.series_a = name_a;
  report.series_b = name_b;
  return report;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("IoError", "cannot open '" + path + "'");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) throw validation_error("EmptyFile", "'" + path + "' has no rows");
  return rows;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& col) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw validation_error("NonNumericCell", "row " + std::to_string(row) +
                                                 ", column " + col + ": '" + cell + "'");
  }
  if (used != cell.size() || !std::isfinite(v)) {
    throw validation_error("NonNumericCell", "row " + std::to_string(row) + ", column " +
                                                 col + ": '" + cell + "'");
  }
  return v;
}

bool is_numeric(const std::string& cell) {
  std::size_t used = 0;
  try {
    (void)std::stod(cell, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == cell.size();
}

}  // namespace

LabeledDataset load_labeled_csv(const std::string& path) {
  const auto rows = read_csv(path);
  const auto& header = rows[0];
  const auto label_it = std::find(header.begin(), header.end(), "label");
  if (label_it == header.end()) {
    throw validation_error("MissingLabelColumn", "'" + path + "' has no `label` column");
  }
  const std::size_t label_col = static_cast<std::size_t>(label_it - header.begin());
  const std::size_t d = header.size() - 1;
  if (rows.size() < 2) throw validation_error("EmptyFile", "no data rows");

  std::vector<std::string> labels;
  Matrix features(static_cast<Eigen::Index>(rows.size() - 1), static_cast<Eigen::Index>(d));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      throw validation_error("RaggedRow", "row " + std::to_string(r) + " has " +
                                              std::to_string(rows[r].size()) +
                                              " cells, expected " +
                                              std::to_string(header.size()));
    }
    Eigen::Index c = 0;
    for (std::size_t j = 0; j < rows[r].size(); ++j) {
      if (j == label_col) {
        labels.push_back(rows[r][j]);
      } else {
        features(static_cast<Eigen::Index>(r - 1), c++) = parse_cell(rows[r][j], r, header[j]);
      }
    }
  }

  // Distinct labels in first-appearance order, empirical prior.
  std::vector<std::string> distinct;
  for (const auto& l : labels) {
    if (std::find(distinct.begin(), distinct.end(), l) == distinct.end()) {
      distinct.push_back(l);
    }
  }
  std::vector<double> prior(distinct.size(), 0.0);
  for (const auto& l : labels) {
    prior[static_cast<std::size_t>(
        std::find(distinct.begin(), distinct.end(), l) - distinct.begin())] += 1.0;
  }
  for (double& p : prior) p /= static_cast<double>(labels.size());
  return LabeledDataset(StateSpace(distinct, prior), labels, features);
}

Matrix load_matrix_csv(const std::string& path) {
  const auto rows = read_csv(path);
  const std::size_t d = rows[0].size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != d) {
      throw validation_error("RaggedRow", "row " + std::to_string(r + 1) + " has " +
                                              std::to_string(rows[r].size()) +
                                              " cells, expected " + std::to_string(d));
    }
    for (std::size_t c = 0; c < d; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_cell(rows[r][c], r + 1, "c" + std::to_string(c));
    }
  }
  return m;
}

PairedSamples load_paired_csv(const std::string& path_x, const std::string& path_y) {
  Matrix x = load_matrix_csv(path_x);
  Matrix y = load_matrix_csv(path_y);
  if (x.rows() != y.rows()) {
    throw validation_error("RowCountMismatch",
                           "'" + path_x + "' and '" + path_y + "' row counts differ");
  }
  return PairedSamples(std::move(x), std::move(y));
}

std::vector<double> load_series_csv(const std::string& path) {
  const auto rows = read_csv(path);
  std::vector<double> out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != 1) {
      throw validation_error("RaggedRow",
                             "series file must have exactly one column (row " +
                                 std::to_string(r + 1) + ")");
    }
    if (r == 0 && !is_numeric(rows[r][0])) continue;  // header
    out.push_back(parse_cell(rows[r][0], r + 1, "value"));
  }
  if (out.empty()) throw validation_error("EmptyFile", "no numeric rows");
  return out;
}

namespace {

std::string format_real(double v) {
  char buf[64];
  if (v == static_cast<double>(static_cast<long long>(v)) && std::abs(v) < 1e15) {
    // Integral values print without an exponent so the form is stable.
    std::snprintf(buf, sizeof(buf), "%.1f", v);
  } else {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
  }
  return buf;
}

void write_canonical(const Json& v, std::string& out) {
  switch (v.type()) {
    case Json::value_t::object: {
      std::map<std::string, const Json*> sorted;
      for (auto it = v.begin(); it != v.end(); ++it) sorted[it.key()] = &it.value();
      out += '{';
      bool first = true;
      for (const auto& [key, val] : sorted) {
        if (!first) out += ',';
        first = false;
        out += Json(key).dump();
        out += ':';
        write_canonical(*val, out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ',';
        write_canonical(v[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float:
      out += format_real(v.get<double>());
      break;
    default:
      out += v.dump();
      break;
  }
}

}  // namespace

std::string canonical_json(const Json& value) {
  std::string out;
  write_canonical(value, out);
  out += '\n';
  return out;
}

std::string render_report(const RunReport& report) {
  Json root;
  root["command"] = report.command;
  root["config"] = report.config;
  root["seed"] = report.seed.seed;
  root["stream"] = report.seed.stream;
  root["results"] = report.results;
  return canonical_json(root);
}

void emit_report(const RunReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("IoError", "cannot write '" + path + "'");
  out << render_report(report);
  if (!out) throw io_error("IoError", "write to '" + path + "' failed");
}

namespace {

constexpr double kPlotWidth = 640.0;
constexpr double kPlotHeight = 420.0;
constexpr double kMarginLeft = 64.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 24.0;
constexpr double kMarginBottom = 48.0;

const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                               "#ff7f0e", "#8c564b"};

std::string svg_num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string render_line_plot(const std::vector<Series>& series) {
  if (series.empty()) throw validation_error("EmptySeries", "no series to plot");
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    if (s.x.size() < 2 || s.x.size() != s.y.size()) {
      throw validation_error("EmptySeries",
                             "series '" + s.name + "' needs >= 2 aligned points");
    }
    for (double v : s.x) {
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
    for (double v : s.y) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;

  const double plot_w = kPlotWidth - kMarginLeft - kMarginRight;
  const double plot_h = kPlotHeight - kMarginTop - kMarginBottom;
  auto sx = [&](double x) { return kMarginLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  auto sy = [&](double y) { return kMarginTop + (ymax - y) / (ymax - ymin) * plot_h; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kPlotWidth
      << "\" height=\"" << kPlotHeight << "\" viewBox=\"0 0 " << kPlotWidth << " "
      << kPlotHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes
  out << "<line x1=\"" << svg_num(kMarginLeft) << "\" y1=\"" << svg_num(kMarginTop)
      << "\" x2=\"" << svg_num(kMarginLeft) << "\" y2=\""
      << svg_num(kMarginTop + plot_h) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << svg_num(kMarginLeft) << "\" y1=\""
      << svg_num(kMarginTop + plot_h) << "\" x2=\"" << svg_num(kMarginLeft + plot_w)
      << "\" y2=\"" << svg_num(kMarginTop + plot_h) << "\" stroke=\"black\"/>\n";
  // axis tick labels at the extremes
  out << "<text x=\"" << svg_num(kMarginLeft) << "\" y=\""
      << svg_num(kPlotHeight - 16.0) << "\" font-size=\"12\">" << svg_num(xmin)
      << "</text>\n";
  out << "<text x=\"" << svg_num(kMarginLeft + plot_w - 24.0) << "\" y=\""
      << svg_num(kPlotHeight - 16.0) << "\" font-size=\"12\">" << svg_num(xmax)
      << "</text>\n";
  out << "<text x=\"8\" y=\"" << svg_num(kMarginTop + plot_h) << "\" font-size=\"12\">"
      << svg_num(ymin) << "</text>\n";
  out << "<text x=\"8\" y=\"" << svg_num(kMarginTop + 12.0) << "\" font-size=\"12\">"
      << svg_num(ymax) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kSeriesColors[s % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (i > 0) out << ' ';
      out << svg_num(sx(series[s].x[i])) << ',' << svg_num(sy(series[s].y[i]));
    }
    out << "\"/>\n";
    out << "<text x=\"" << svg_num(kMarginLeft + plot_w - 150.0) << "\" y=\""
        << svg_num(kMarginTop + 16.0 + 16.0 * static_cast<double>(s))
        << "\" font-size=\"12\" fill=\"" << color << "\">" << series[s].name
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void emit_line_plot(const std::vector<Series>& series, const std::string& path) {
  const std::string svg = render_line_plot(series);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("IoError", "cannot write '" + path + "'");
  out << svg;
  if (!out) throw io_error("IoError", "write to '" + path + "' failed");
}

}  // namespace dtmi
