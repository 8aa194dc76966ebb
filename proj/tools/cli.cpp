// dtmi: sensing-capability analysis from the command line.
//
// Every subcommand is a pure function of (config, flags, seed): rerunning
// with identical inputs produces byte-identical reports and plots.

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>

#include "dtmi/bounds.hpp"
#include "dtmi/infotheory.hpp"
#include "dtmi/knn_mi.hpp"
#include "dtmi/pipelines.hpp"
#include "dtmi/report.hpp"
#include "dtmi/simchannel.hpp"
#include "dtmi/typicality.hpp"

namespace {

using dtmi::Json;
using dtmi::Matrix;

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string out;
  std::string estimator = "mixed_ksg";
  int k = 3;
  double epsilon = 0.05;
  std::size_t trials = 10000;
  std::string config;
};

dtmi::RngSeed seed_of(const GlobalOpts& g) { return {g.seed, g.stream}; }

Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dtmi::io_error("IoError", "cannot open config '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw dtmi::validation_error("ConfigParseError", e.what());
  }
  return j;
}

dtmi::StateSpace parse_state_space(const Json& config) {
  if (!config.contains("state_space")) {
    throw dtmi::validation_error("ConfigError", "missing `state_space` section");
  }
  const Json& s = config["state_space"];
  return dtmi::validate_state_space(s.at("labels").get<std::vector<std::string>>(),
                                    s.at("prior").get<std::vector<double>>());
}

dtmi::FeatureEncoder parse_encoder(const Json& config) {
  if (!config.contains("encoder")) {
    throw dtmi::validation_error("ConfigError", "missing `encoder` section");
  }
  const Json& e = config["encoder"];
  const std::string type = e.value("type", "codebook");
  if (type == "codebook") {
    auto codewords = e.at("codewords").get<std::vector<std::vector<int>>>();
    const int alphabet = e.at("alphabet").get<int>();
    const int repeat = e.value("repeat", 1);
    return dtmi::build_repetition_encoder(codewords, repeat, alphabet);
  }
  if (type == "stochastic") {
    std::vector<std::vector<dtmi::DiscreteDistribution>> dists;
    for (const Json& per_state : e.at("distributions")) {
      std::vector<dtmi::DiscreteDistribution> row;
      for (const Json& d : per_state) {
        row.emplace_back(d.get<std::vector<double>>());
      }
      dists.push_back(std::move(row));
    }
    return dtmi::FeatureEncoder::stochastic(std::move(dists));
  }
  throw dtmi::validation_error("ConfigError", "unknown encoder type '" + type + "'");
}

struct ParsedChannel {
  std::optional<dtmi::DMCModel> dmc;
  std::optional<dtmi::GaussianChannel> gaussian;
};

ParsedChannel parse_channel(const Json& config) {
  if (!config.contains("channel")) {
    throw dtmi::validation_error("ConfigError", "missing `channel` section");
  }
  const Json& c = config["channel"];
  const std::string type = c.value("type", "bsc");
  ParsedChannel out;
  if (type == "bsc") {
    out.dmc = dtmi::DMCModel::bsc(c.at("crossover").get<double>());
  } else if (type == "dmc") {
    const auto rows = c.at("table").get<std::vector<std::vector<double>>>();
    Matrix t(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(rows.empty() ? 0 : rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows[0].size()) {
        throw dtmi::validation_error("ConfigError", "ragged channel table");
      }
      for (std::size_t q = 0; q < rows[r].size(); ++q) {
        t(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q)) = rows[r][q];
      }
    }
    out.dmc = dtmi::DMCModel(t);
  } else if (type == "gaussian") {
    out.gaussian = dtmi::GaussianChannel(c.at("sigma").get<double>());
  } else {
    throw dtmi::validation_error("ConfigError", "unknown channel type '" + type + "'");
  }
  return out;
}

dtmi::DecoderSpec parse_decoder(const Json& config, double default_epsilon) {
  dtmi::DecoderSpec spec = dtmi::DecoderSpec::ml();
  spec.epsilon = default_epsilon;
  if (!config.contains("decoder")) return spec;
  const Json& d = config["decoder"];
  const std::string kind = d.value("kind", "ml");
  if (kind == "ml") {
    spec.kind = dtmi::DecoderSpec::Kind::ml;
  } else if (kind == "typicality") {
    spec.kind = dtmi::DecoderSpec::Kind::typicality;
  } else if (kind == "nearest_centroid") {
    spec.kind = dtmi::DecoderSpec::Kind::nearest_centroid;
  } else {
    throw dtmi::validation_error("ConfigError", "unknown decoder kind '" + kind + "'");
  }
  if (d.contains("epsilon")) spec.epsilon = d["epsilon"].get<double>();
  return spec;
}

dtmi::EstimatorConfig estimator_config(const GlobalOpts& g, const std::string& aggregation) {
  dtmi::EstimatorConfig cfg;
  cfg.estimator_id = dtmi::estimator_from_string(g.estimator);
  cfg.k = g.k;
  cfg.aggregation = aggregation == "sum" ? dtmi::Aggregation::per_dimension_sum
                                         : dtmi::Aggregation::joint;
  return cfg;
}

Json mi_to_json(const dtmi::MIEstimate& e) {
  Json j;
  j["bits"] = e.bits;
  j["raw_bits"] = e.raw_bits;
  j["estimator"] = dtmi::to_string(e.estimator_id);
  if (e.k) j["k"] = *e.k;
  j["n_samples"] = e.n_samples;
  j["clamped"] = e.clamped;
  return j;
}

Json interval_to_json(const dtmi::Interval& iv) {
  return Json{{"lo", iv.lo}, {"hi", iv.hi}};
}

void finish(const GlobalOpts& g, dtmi::RunReport& report,
            std::chrono::steady_clock::time_point started) {
  const auto elapsed = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - started)
                           .count();
  if (g.out.empty()) {
    std::cout << dtmi::render_report(report);
  } else {
    dtmi::emit_report(report, g.out);
  }
  std::cerr << "wall_time_ms " << elapsed << "\n";
}

// plugin MI over integer-valued single-column pairs via the empirical joint.
dtmi::MIEstimate empirical_plugin_mi(const dtmi::PairedSamples& samples) {
  if (samples.x().cols() != 1 || samples.y().cols() != 1) {
    throw dtmi::validation_error("InvalidArguments",
                                 "plugin estimation needs 1-d integer-valued data");
  }
  const Eigen::Index n = samples.rows();
  auto key_of = [](double v) {
    const double rounded = std::nearbyint(v);
    if (std::abs(v - rounded) > 1e-9) {
      throw dtmi::validation_error("InvalidArguments",
                                   "plugin estimation needs integer-valued cells");
    }
    return static_cast<long long>(rounded);
  };
  std::map<long long, int> xids, yids;
  for (Eigen::Index i = 0; i < n; ++i) {
    xids.emplace(key_of(samples.x()(i, 0)), 0);
    yids.emplace(key_of(samples.y()(i, 0)), 0);
  }
  int next = 0;
  for (auto& [k, v] : xids) v = next++;
  next = 0;
  for (auto& [k, v] : yids) v = next++;
  Matrix counts = Matrix::Zero(static_cast<Eigen::Index>(xids.size()),
                               static_cast<Eigen::Index>(yids.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    counts(xids[key_of(samples.x()(i, 0))], yids[key_of(samples.y()(i, 0))]) += 1.0;
  }
  return dtmi::plugin_mi(dtmi::JointTable(counts / static_cast<double>(n)));
}

Json bound_to_json(const dtmi::BoundReport& b) {
  Json j;
  j["lower_relaxed"] = b.lower_relaxed;
  j["lower_tight"] = b.lower_tight;
  j["upper_raw"] = b.upper_raw;
  j["upper_clamped"] = b.upper_clamped;
  j["epsilon"] = b.epsilon;
  j["n"] = b.n;
  j["m"] = b.m;
  j["h_w_bits"] = b.h_w_bits;
  j["dtmi_bits"] = b.dtmi_bits;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-task mutual information sensing analysis"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--stream", g.stream, "RNG substream index")->capture_default_str();
  app.add_option("--out", g.out, "write the report to this path (default stdout)");
  app.add_option("--estimator", g.estimator, "ksg1|ksg2|mixed_ksg|plugin")
      ->capture_default_str();
  app.add_option("--k", g.k, "neighbor count")->capture_default_str();
  app.add_option("--epsilon", g.epsilon, "typicality epsilon in bits")->capture_default_str();
  app.add_option("--trials", g.trials, "Monte Carlo trials")->capture_default_str();
  app.add_option("--config", g.config, "JSON config file");

  auto* mi_cmd = app.add_subcommand("mi-estimate", "estimate DTMI from paired CSVs");
  std::string mi_x, mi_y, mi_aggregation = "joint";
  mi_cmd->add_option("--x", mi_x, "CSV of X rows")->required();
  mi_cmd->add_option("--y", mi_y, "CSV of Y rows")->required();
  mi_cmd->add_option("--aggregation", mi_aggregation, "joint|sum")->capture_default_str();

  auto* bounds_cmd =
      app.add_subcommand("bounds", "error bounds from MI inputs or a channel config");
  double b_hw = -1.0, b_dtmi = -1.0;
  int b_m = 0, b_n = 1;
  bounds_cmd->add_option("--hw", b_hw, "H(W) in bits");
  bounds_cmd->add_option("--dtmi", b_dtmi, "DTMI in bits");
  bounds_cmd->add_option("--m", b_m, "state count");
  bounds_cmd->add_option("--n", b_n, "feature dimension")->capture_default_str();

  auto* sim_cmd =
      app.add_subcommand("simulate", "Monte Carlo sensing error with bound sandwich");
  std::string sim_decoder;
  sim_cmd->add_option("--decoder", sim_decoder,
                      "ml|typicality|nearest_centroid (overrides config)");

  auto* typ_cmd =
      app.add_subcommand("typicality", "matching-set probabilities and size bound");
  std::string typ_mode = "joint";
  int typ_n = 0;
  typ_cmd->add_option("--mode", typ_mode, "joint|product")->capture_default_str();
  typ_cmd->add_option("--n", typ_n, "sequence length (defaults to config dims)");

  auto* aoa_cmd = app.add_subcommand("aoa-sweep", "MUSIC direction-classification sweep");
  std::string aoa_plot;
  int aoa_trials = 2000;
  aoa_cmd->add_option("--plot", aoa_plot, "write an SVG plot to this path");
  aoa_cmd->add_option("--sweep-trials", aoa_trials, "trials per sweep point")
      ->capture_default_str();

  auto* cls_cmd =
      app.add_subcommand("classify", "k-fold KNN classification with DTMI rate test");
  std::string cls_data;
  int cls_folds = 5, cls_k = 5;
  cls_cmd->add_option("--data", cls_data, "labeled CSV")->required();
  cls_cmd->add_option("--folds", cls_folds, "fold count")->capture_default_str();
  cls_cmd->add_option("--knn", cls_k, "KNN neighbor count")->capture_default_str();

  auto* det_cmd = app.add_subcommand("detect", "threshold detectors over matrix CSVs");
  std::string det_kind, det_data, det_baseline;
  dtmi::DetectorConfig det_config;
  det_cmd->add_option("--kind", det_kind, "cov|rssi")->required();
  det_cmd->add_option("--data", det_data, "matrix CSV (rows = subcarriers/tags)")->required();
  det_cmd->add_option("--baseline", det_baseline, "per-tag baseline CSV (rssi)");
  det_cmd->add_option("--window", det_config.window_len, "CoV window length")
      ->capture_default_str();
  det_cmd->add_option("--low", det_config.threshold_low, "CoV absent-band low")
      ->capture_default_str();
  det_cmd->add_option("--high", det_config.threshold_high, "CoV absent-band high")
      ->capture_default_str();
  det_cmd->add_option("--rssi-threshold", det_config.rssi_threshold,
                      "RSSI differential threshold")
      ->capture_default_str();

  auto* cor_cmd = app.add_subcommand("correlate", "Pearson correlation of two series CSVs");
  std::string cor_a, cor_b;
  cor_cmd->add_option("--a", cor_a, "first series CSV")->required();
  cor_cmd->add_option("--b", cor_b, "second series CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const auto started = std::chrono::steady_clock::now();
  try {
    dtmi::RunReport report;
    report.seed = seed_of(g);

    if (*mi_cmd) {
      report.command = "mi-estimate";
      report.config = Json{{"x", mi_x}, {"y", mi_y}, {"estimator", g.estimator},
                           {"k", g.k}, {"aggregation", mi_aggregation}};
      const dtmi::PairedSamples samples = dtmi::load_paired_csv(mi_x, mi_y);
      dtmi::MIEstimate est;
      if (g.estimator == "plugin") {
        est = empirical_plugin_mi(samples);
      } else {
        est = dtmi::estimate_dtmi(samples, estimator_config(g, mi_aggregation), seed_of(g));
      }
      report.results["mi"] = mi_to_json(est);
    } else if (*bounds_cmd) {
      report.command = "bounds";
      dtmi::BoundReport bound;
      if (!g.config.empty()) {
        const Json config = load_config(g.config);
        report.config = config;
        const dtmi::StateSpace space = parse_state_space(config);
        const dtmi::FeatureEncoder encoder = parse_encoder(config);
        const ParsedChannel channel = parse_channel(config);
        if (!channel.dmc) {
          throw dtmi::validation_error("InvalidArguments",
                                       "bounds need a finite-alphabet channel");
        }
        const dtmi::ChannelMIReport mi = dtmi::exact_channel_mi(encoder, *channel.dmc, space);
        const dtmi::CrossMIMatrix cross = dtmi::cross_mi_exact(encoder, *channel.dmc, space);
        bound = dtmi::typicality_upper_bound(cross, space, encoder.dims(), g.epsilon);
        bound.h_w_bits = space.entropy_bits();
        bound.dtmi_bits = mi.total_xy_bits;
        report.results["per_dim_mi_bits"] = mi.per_dim_xy_bits;
        const Matrix avg = cross.terms() / static_cast<double>(encoder.dims());
        const dtmi::LosslessReport lossless =
            dtmi::lossless_condition(space.size(), encoder.dims(), avg, g.epsilon);
        report.results["lossless"] = Json{{"rate_bits", lossless.rate_bits},
                                          {"threshold_bits", lossless.threshold_bits},
                                          {"satisfied", lossless.satisfied},
                                          {"margin_bits", lossless.margin_bits}};
      } else {
        if (b_hw < 0.0 || b_dtmi < 0.0 || b_m < 2) {
          throw dtmi::validation_error(
              "InvalidArguments", "bounds need --hw, --dtmi and --m (or --config)");
        }
        report.config = Json{{"hw", b_hw}, {"dtmi", b_dtmi}, {"m", b_m}, {"n", b_n},
                             {"epsilon", g.epsilon}};
        // Without a channel config the cross terms are taken uniformly at
        // the supplied DTMI total.
        Matrix terms = Matrix::Zero(b_m, b_m);
        for (int j = 0; j < b_m; ++j) {
          for (int k2 = 0; k2 < b_m; ++k2) {
            if (j != k2) terms(j, k2) = b_dtmi;
          }
        }
        bound = dtmi::typicality_upper_bound(dtmi::CrossMIMatrix(terms),
                                             dtmi::StateSpace::uniform(b_m), b_n, g.epsilon);
        bound.h_w_bits = b_hw;
        bound.dtmi_bits = b_dtmi;
      }
      bound.lower_relaxed = dtmi::fano_lower_relaxed(bound.h_w_bits, bound.dtmi_bits, bound.m);
      bound.lower_tight = dtmi::fano_lower_tight(bound.h_w_bits, bound.dtmi_bits, bound.m);
      report.results["bounds"] = bound_to_json(bound);
    } else if (*sim_cmd) {
      report.command = "simulate";
      if (g.config.empty()) {
        throw dtmi::validation_error("InvalidArguments", "simulate needs --config");
      }
      const Json config = load_config(g.config);
      report.config = config;
      const dtmi::StateSpace space = parse_state_space(config);
      const dtmi::FeatureEncoder encoder = parse_encoder(config);
      const ParsedChannel channel = parse_channel(config);
      dtmi::DecoderSpec decoder = parse_decoder(config, g.epsilon);
      if (!sim_decoder.empty()) {
        decoder = parse_decoder(
            Json{{"decoder", Json{{"kind", sim_decoder}, {"epsilon", g.epsilon}}}},
            g.epsilon);
      }
      dtmi::MonteCarloResult mc;
      if (channel.dmc) {
        mc = dtmi::run_monte_carlo(space, encoder, *channel.dmc, decoder, g.trials,
                                   seed_of(g));
      } else {
        mc = dtmi::run_monte_carlo(space, encoder, *channel.gaussian, decoder, g.trials,
                                   seed_of(g));
      }
      report.results["p_e"] = mc.p_e;
      report.results["xi"] = mc.xi;
      report.results["trials_per_state"] = mc.trials_per_state;
      report.results["ci_95"] = interval_to_json(mc.ci_95);
      report.results["trials"] = mc.trials;
      if (channel.dmc) {
        const dtmi::ChannelMIReport mi = dtmi::exact_channel_mi(encoder, *channel.dmc, space);
        const double h_w = space.entropy_bits();
        const double lower = dtmi::fano_lower_tight(h_w, mi.total_xy_bits, space.size());
        const dtmi::BoundReport upper = dtmi::typicality_upper_bound(
            dtmi::cross_mi_exact(encoder, *channel.dmc, space), space, encoder.dims(),
            decoder.epsilon);
        const double slack = 3.0 * mc.ci_95.half_width();
        report.results["bound_sandwich"] =
            Json{{"fano_lower_tight", lower},
                 {"typicality_upper_clamped", upper.upper_clamped},
                 {"within", mc.p_e >= lower - slack &&
                                mc.p_e <= upper.upper_clamped + slack}};
      } else {
        report.results["bound_sandwich"] = Json{{"within", nullptr}};
      }
    } else if (*typ_cmd) {
      report.command = "typicality";
      if (g.config.empty()) {
        throw dtmi::validation_error("InvalidArguments", "typicality needs --config");
      }
      const Json config = load_config(g.config);
      report.config = config;
      const auto rows = config.at("joint").get<std::vector<std::vector<double>>>();
      Matrix table(static_cast<Eigen::Index>(rows.size()),
                   static_cast<Eigen::Index>(rows.empty() ? 0 : rows[0].size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
          table(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
      }
      const int dims = typ_n > 0 ? typ_n : config.value("dims", 1);
      const dtmi::ReferenceJoint ref =
          dtmi::ReferenceJoint::iid(dtmi::JointTable(table), dims);
      const dtmi::DrawMode mode =
          typ_mode == "product" ? dtmi::DrawMode::product_draw : dtmi::DrawMode::joint_draw;
      const dtmi::TypicalityProbability prob =
          dtmi::typicality_probability(ref, dims, g.epsilon, mode, g.trials, seed_of(g));
      report.results["mode"] = typ_mode;
      report.results["p_member"] = prob.p_hat;
      report.results["ci_95"] = interval_to_json(prob.ci_95);
      report.results["log2_size_bound"] =
          dtmi::matching_set_log_size_bound(ref, dims, g.epsilon);
      report.results["lemma4_log2_bound"] = 3.0 * dims * g.epsilon - ref.sum_mi_bits();
    } else if (*aoa_cmd) {
      report.command = "aoa-sweep";
      if (g.config.empty()) {
        throw dtmi::validation_error("InvalidArguments", "aoa-sweep needs --config");
      }
      const Json config = load_config(g.config);
      report.config = config;
      dtmi::AoAScenario base;
      if (config.contains("geometry")) {
        const Json& geo = config["geometry"];
        base.geometry.q = geo.value("q", 3);
        base.geometry.spacing_m = geo.value("spacing_m", 0.03);
        base.geometry.wavelength_m = geo.value("wavelength_m", 0.06);
      }
      base.snapshots = config.value("snapshots", 16);
      base.m_classes = config.value("m_classes", 9);
      base.snr_db = config.value("snr_db", 10.0);
      base.target_distance_m = config.value("distance_m", 1.0);
      base.pathloss_exponent = config.value("pathloss_exponent", 2.0);
      if (!base.geometry.unambiguous()) {
        std::cerr << "warning: antenna spacing exceeds half the wavelength; "
                     "the angular scan may alias near endfire\n";
      }
      std::vector<dtmi::AoAScenario> points;
      const Json& sweep = config.at("sweep");
      if (sweep.contains("snr_db")) {
        for (double snr : sweep["snr_db"].get<std::vector<double>>()) {
          dtmi::AoAScenario sc = base;
          sc.snr_db = snr;
          points.push_back(sc);
        }
      } else if (sweep.contains("distance_m")) {
        for (double d : sweep["distance_m"].get<std::vector<double>>()) {
          dtmi::AoAScenario sc = base;
          sc.target_distance_m = d;
          points.push_back(sc);
        }
      } else {
        throw dtmi::validation_error("ConfigError",
                                     "sweep needs `snr_db` or `distance_m` lists");
      }
      const dtmi::EstimatorConfig est = estimator_config(g, "joint");
      const std::vector<dtmi::AoAPoint> series =
          dtmi::aoa_sweep(points, aoa_trials, est, seed_of(g));
      Json rows = Json::array();
      std::vector<double> xs, acc, mi, fano;
      const bool by_snr = sweep.contains("snr_db");
      for (const auto& p : series) {
        rows.push_back(Json{{"snr_db", p.snr_db},
                            {"distance_m", p.distance_m},
                            {"accuracy", p.accuracy},
                            {"dtmi_bits", p.dtmi_bits},
                            {"fano_lower", p.fano_lower}});
        xs.push_back(by_snr ? p.snr_db : p.distance_m);
        acc.push_back(p.accuracy);
        mi.push_back(p.dtmi_bits);
        fano.push_back(p.fano_lower);
      }
      report.results["series"] = rows;
      if (series.size() >= 3) {
        report.results["pearson_accuracy_dtmi"] = dtmi::pearson(acc, mi).r;
        std::vector<double> inv;
        for (double f : fano) inv.push_back(1.0 - f);
        report.results["pearson_accuracy_one_minus_fano"] = dtmi::pearson(acc, inv).r;
      }
      if (!aoa_plot.empty()) {
        dtmi::emit_line_plot({{"accuracy", xs, acc}, {"dtmi_bits", xs, mi}}, aoa_plot);
      }
    } else if (*cls_cmd) {
      report.command = "classify";
      report.config = Json{{"data", cls_data}, {"folds", cls_folds}, {"knn", cls_k},
                           {"estimator", g.estimator}, {"k", g.k},
                           {"epsilon", g.epsilon}};
      const dtmi::LabeledDataset data = dtmi::load_labeled_csv(cls_data);
      const dtmi::CrossValidationReport cv = dtmi::cross_validate(
          data, cls_folds, cls_k, estimator_config(g, "joint"), seed_of(g), g.epsilon);
      Json folds = Json::array();
      for (const auto& f : cv.folds) {
        folds.push_back(Json{{"accuracy", f.accuracy},
                             {"dtmi_bits", f.dtmi_bits},
                             {"per_dim_sum_bits", f.per_dim_sum_bits}});
      }
      report.results["folds"] = folds;
      report.results["mean_accuracy"] = cv.mean_accuracy;
      report.results["mean_dtmi_bits"] = cv.mean_dtmi_bits;
      report.results["lossless"] = Json{{"rate_bits", cv.lossless.rate_bits},
                                        {"threshold_bits", cv.lossless.threshold_bits},
                                        {"satisfied", cv.lossless.satisfied},
                                        {"margin_bits", cv.lossless.margin_bits}};
    } else if (*det_cmd) {
      report.command = "detect";
      report.config = Json{{"kind", det_kind}, {"data", det_data},
                           {"window", det_config.window_len},
                           {"low", det_config.threshold_low},
                           {"high", det_config.threshold_high},
                           {"rssi_threshold", det_config.rssi_threshold}};
      const Matrix data = dtmi::load_matrix_csv(det_data);
      if (det_kind == "cov") {
        const dtmi::CovDetection d = dtmi::cov_detect(data, det_config);
        report.results["decision"] = d.present ? "present" : "absent";
        report.results["embedding"] = d.embedding;
      } else if (det_kind == "rssi") {
        std::vector<double> baseline;
        if (det_baseline.empty()) {
          baseline.assign(static_cast<std::size_t>(data.rows()), 0.0);
        } else {
          baseline = dtmi::load_series_csv(det_baseline);
        }
        const dtmi::RssiDetection d = dtmi::rssi_detect(data, baseline, det_config);
        report.results["decision"] = d.open ? "open" : "closed";
        report.results["mean_differential"] = d.mean_differential;
      } else {
        throw dtmi::validation_error("InvalidArguments",
                                     "detect --kind must be cov or rssi");
      }
    } else if (*cor_cmd) {
      report.command = "correlate";
      report.config = Json{{"a", cor_a}, {"b", cor_b}};
      const std::vector<double> a = dtmi::load_series_csv(cor_a);
      const std::vector<double> b = dtmi::load_series_csv(cor_b);
      const dtmi::CorrelationReport r = dtmi::pearson(a, b, cor_a, cor_b);
      report.results["r"] = r.r;
      report.results["n_points"] = r.n_points;
    }

    finish(g, report, started);
  } catch (const dtmi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == dtmi::Error::Kind::infeasible ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
