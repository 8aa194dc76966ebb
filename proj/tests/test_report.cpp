#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "dtmi/report.hpp"
#include "dtmi/rng.hpp"
#include "helpers.hpp"

using namespace dtmi;

namespace {
struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path("/tmp/dtmi_test_" + name) {
    std::ofstream out(path, std::ios::binary);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}
}  // namespace

TEST_SUITE("report") {

TEST_CASE("pearson: exact values") {
  CHECK(pearson({1, 2, 3}, {2, 4, 6}).r == doctest::Approx(1.0));
  CHECK(pearson({1, 2, 3}, {3, 2, 1}).r == doctest::Approx(-1.0));
  CHECK(pearson({1, 2, 3, 4}, {1, 3, 2, 4}).r == doctest::Approx(0.8));
  CHECK_THROWS_WITH_AS(pearson({1, 2}, {1, 2}), doctest::Contains("LengthMismatch"),
                       Error);
  CHECK_THROWS_WITH_AS(pearson({1, 1, 1}, {1, 2, 3}), doctest::Contains("ConstantSeries"),
                       Error);
}

TEST_CASE("pearson matches a two-pass reference on fuzzed inputs") {
  Rng rng(RngSeed{81, 0});
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(rng.uniform_int(40));
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.uniform(-5.0, 5.0);
      b[i] = rng.uniform(-5.0, 5.0) + 0.3 * a[i];
    }
    // reference: explicit standardization pass
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      ma += a[i];
      mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double va = 0, vb = 0, cab = 0;
    for (std::size_t i = 0; i < n; ++i) {
      va += (a[i] - ma) * (a[i] - ma);
      vb += (b[i] - mb) * (b[i] - mb);
    }
    for (std::size_t i = 0; i < n; ++i) {
      cab += (a[i] - ma) / std::sqrt(va) * (b[i] - mb) / std::sqrt(vb);
    }
    const double r = pearson(a, b).r;
    CHECK(r == doctest::Approx(cab).epsilon(1e-12));
    CHECK(std::abs(r) <= 1.0 + 1e-12);
  }
}

TEST_CASE("labeled CSV loading and error locations") {
  TempFile good("good.csv", "label,f1,f2\nx,1.0,2.0\ny,3.5,-4.5\n");
  const LabeledDataset d = load_labeled_csv(good.path);
  CHECK(d.rows() == 2);
  CHECK(d.dim() == 2);
  CHECK(d.space().size() == 2);
  CHECK(d.features()(1, 1) == doctest::Approx(-4.5));

  TempFile missing("missing.csv", "id,f1\nx,1.0\ny,2.0\n");
  CHECK_THROWS_WITH_AS(load_labeled_csv(missing.path),
                       doctest::Contains("MissingLabelColumn"), Error);

  TempFile bad_cell("badcell.csv", "label,f1,f3\nx,1.0,2.0\ny,1.0,abc\n");
  try {
    load_labeled_csv(bad_cell.path);
    FAIL("expected NonNumericCell");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("NonNumericCell") != std::string::npos);
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    CHECK(std::string(e.what()).find("f3") != std::string::npos);
  }

  TempFile ragged("ragged.csv", "label,f1,f2\nx,1.0,2.0\ny,1.0\n");
  CHECK_THROWS_WITH_AS(load_labeled_csv(ragged.path), doctest::Contains("RaggedRow"),
                       Error);
}

TEST_CASE("paired CSV loading") {
  TempFile x("x.csv", "0.0,1.0\n2.0,3.0\n");
  TempFile y("y.csv", "5.0\n6.0\n");
  const PairedSamples s = load_paired_csv(x.path, y.path);
  CHECK(s.rows() == 2);
  CHECK(s.x().cols() == 2);
  CHECK(s.y().cols() == 1);

  TempFile shorty("short.csv", "5.0\n");
  CHECK_THROWS_WITH_AS(load_paired_csv(x.path, shorty.path),
                       doctest::Contains("RowCountMismatch"), Error);
}

TEST_CASE("series CSV accepts an optional header") {
  TempFile with_header("hdr.csv", "value\n1.5\n2.5\n");
  CHECK(load_series_csv(with_header.path) == std::vector<double>{1.5, 2.5});
  TempFile without("nohdr.csv", "1.5\n2.5\n");
  CHECK(load_series_csv(without.path) == std::vector<double>{1.5, 2.5});
}

TEST_CASE("missing files raise IoError") {
  CHECK_THROWS_WITH_AS(load_labeled_csv("/nonexistent/missing.csv"),
                       doctest::Contains("IoError"), Error);
  CHECK_THROWS_WITH_AS(load_matrix_csv("/nonexistent/missing.csv"),
                       doctest::Contains("IoError"), Error);
  try {
    load_series_csv("/nonexistent/missing.csv");
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.kind() == Error::Kind::io);
  }
}

TEST_CASE("canonical report serialization round-trips byte-identically") {
  RunReport report;
  report.command = "simulate";
  report.seed = RngSeed{42, 7};
  report.config = Json{{"channel", {{"type", "bsc"}, {"crossover", 0.1}}},
                       {"trials", 1000}};
  report.results = Json{{"p_e", 0.028},
                        {"xi", Json::array({0.028, 0.02800000000000001})},
                        {"note", "x"},
                        {"whole", 3.0}};
  const std::string first = render_report(report);
  CHECK(first.back() == '\n');
  CHECK(first.find("\"seed\":42") != std::string::npos);

  const std::string second = canonical_json(Json::parse(first));
  CHECK(first == second);

  // keys are sorted
  CHECK(first.find("\"command\"") < first.find("\"config\""));
  CHECK(first.find("\"config\"") < first.find("\"results\""));

  TempFile sink("report.json", "");
  emit_report(report, sink.path);
  CHECK(slurp(sink.path) == first);
  emit_report(report, sink.path);
  CHECK(slurp(sink.path) == first);  // rerun, identical bytes
}

TEST_CASE("reals carry full precision through the canonical form") {
  Json j;
  j["v"] = 0.1 + 0.2;  // 0.30000000000000004
  const std::string s = canonical_json(j);
  const Json back = Json::parse(s);
  CHECK(back["v"].get<double>() == 0.1 + 0.2);
  CHECK(canonical_json(back) == s);
}

TEST_CASE("line plots are valid deterministic SVG") {
  Series a{"accuracy", {0.0, 1.0, 2.0}, {0.2, 0.5, 0.9}};
  Series b{"dtmi", {0.0, 1.0, 2.0}, {0.1, 0.8, 3.0}};
  const std::string svg = render_line_plot({a, b});
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("accuracy") != std::string::npos);
  CHECK(render_line_plot({a, b}) == svg);

  Series two{"s", {0.0, 1.0}, {1.0, 2.0}};
  const std::string small = render_line_plot({two});
  CHECK(small.find("<polyline") != std::string::npos);

  CHECK_THROWS_WITH_AS(render_line_plot({}), doctest::Contains("EmptySeries"), Error);
  Series degenerate{"d", {0.0}, {1.0}};
  CHECK_THROWS_WITH_AS(render_line_plot({degenerate}), doctest::Contains("EmptySeries"),
                       Error);

  TempFile sink("plot.svg", "");
  emit_line_plot({a, b}, sink.path);
  CHECK(slurp(sink.path) == svg);
}

}  // TEST_SUITE
