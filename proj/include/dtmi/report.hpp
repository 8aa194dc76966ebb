#ifndef DTMI_REPORT_HPP_
#define DTMI_REPORT_HPP_

#include <json.hpp>
#include <string>
#include <vector>

#include "dtmi/core.hpp"

namespace dtmi {

using Json = nlohmann::json;

struct CorrelationReport {
  double r = 0.0;
  std::size_t n_points = 0;
  std::string series_a;
  std::string series_b;
};

// One CLI run: command, echoed config, seed and the results payload.
// Wall time is printed to stderr but never serialized, so reruns with the
// same config and seed stay byte-identical.
struct RunReport {
  std::string command;
  Json config = Json::object();
  RngSeed seed;
  Json results = Json::object();
};

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

CorrelationReport pearson(const std::vector<double>& a, const std::vector<double>& b,
                          const std::string& name_a = "a", const std::string& name_b = "b");

// Header row required, one column named `label`; every other column parses
// as a real feature. The state space is built from the distinct labels in
// first-appearance order with an empirical prior.
LabeledDataset load_labeled_csv(const std::string& path);

PairedSamples load_paired_csv(const std::string& path_x, const std::string& path_y);

// Numeric matrix CSV without a header (all cells real).
Matrix load_matrix_csv(const std::string& path);

// Single numeric column; an optional non-numeric first row is treated as a
// header and skipped.
std::vector<double> load_series_csv(const std::string& path);

// Canonical serialization: keys sorted, reals with 17 significant digits,
// newline-terminated. parse -> serialize round-trips byte-identically.
std::string canonical_json(const Json& value);

void emit_report(const RunReport& report, const std::string& path);
std::string render_report(const RunReport& report);

// Standalone SVG line plot with axes and per-series labels; byte-identical
// output for identical input.
std::string render_line_plot(const std::vector<Series>& series);
void emit_line_plot(const std::vector<Series>& series, const std::string& path);

}  // namespace dtmi

#endif  // DTMI_REPORT_HPP_
