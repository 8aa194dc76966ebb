// Python bindings for the dtmi core: estimators, bounds, typicality
// machinery, the channel simulator and the case-study pipelines.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dtmi/bounds.hpp"
#include "dtmi/infotheory.hpp"
#include "dtmi/knn_mi.hpp"
#include "dtmi/pipelines.hpp"
#include "dtmi/report.hpp"
#include "dtmi/simchannel.hpp"
#include "dtmi/typicality.hpp"

namespace py = pybind11;
using namespace dtmi;

namespace {

RngSeed make_seed(std::uint64_t seed, std::uint64_t stream) { return {seed, stream}; }

EstimatorConfig make_config(const std::string& estimator, int k,
                            const std::string& aggregation) {
  EstimatorConfig cfg;
  cfg.estimator_id = estimator_from_string(estimator);
  cfg.k = k;
  cfg.aggregation = aggregation == "sum" ? Aggregation::per_dimension_sum
                                         : Aggregation::joint;
  return cfg;
}

py::dict mi_dict(const MIEstimate& e) {
  py::dict d;
  d["bits"] = e.bits;
  d["raw_bits"] = e.raw_bits;
  d["estimator"] = to_string(e.estimator_id);
  d["n_samples"] = e.n_samples;
  d["clamped"] = e.clamped;
  if (e.k) d["k"] = *e.k;
  return d;
}

}  // namespace

PYBIND11_MODULE(dtmipy, m) {
  m.doc() = "Discrete-task mutual information sensing analysis";

  py::register_exception<Error>(m, "DtmiError");

  // information-theoretic kernels
  m.def("entropy",
        [](const std::vector<double>& p) { return entropy(DiscreteDistribution(p)); },
        py::arg("probabilities"), "Shannon entropy in bits");
  m.def("binary_entropy", &binary_entropy, py::arg("p"));
  m.def("plugin_mi",
        [](const Matrix& joint) { return mi_dict(plugin_mi(JointTable(joint))); },
        py::arg("joint"), "Exact plug-in MI of a joint table, in bits");
  m.def("conditional_entropy",
        [](const Matrix& joint) { return conditional_entropy(JointTable(joint)); },
        py::arg("joint"));
  m.def("digamma", &digamma, py::arg("x"));
  m.def("gaussian_mi_oracle", &gaussian_mi_oracle, py::arg("rho"));

  // k-NN estimators
  m.def("ksg1",
        [](const Matrix& x, const Matrix& y, int k, std::uint64_t seed,
           std::uint64_t stream) {
          return mi_dict(ksg1(PairedSamples(x, y), k, make_seed(seed, stream)));
        },
        py::arg("x"), py::arg("y"), py::arg("k") = 3, py::arg("seed") = 0,
        py::arg("stream") = 0);
  m.def("ksg2",
        [](const Matrix& x, const Matrix& y, int k, std::uint64_t seed,
           std::uint64_t stream) {
          return mi_dict(ksg2(PairedSamples(x, y), k, make_seed(seed, stream)));
        },
        py::arg("x"), py::arg("y"), py::arg("k") = 3, py::arg("seed") = 0,
        py::arg("stream") = 0);
  m.def("mixed_ksg",
        [](const Matrix& x, const Matrix& y, int k) {
          return mi_dict(mixed_ksg(PairedSamples(x, y), k));
        },
        py::arg("x"), py::arg("y"), py::arg("k") = 3);
  m.def("estimate_dtmi",
        [](const Matrix& x, const Matrix& y, const std::string& estimator, int k,
           const std::string& aggregation, std::uint64_t seed, std::uint64_t stream) {
          return mi_dict(estimate_dtmi(PairedSamples(x, y),
                                       make_config(estimator, k, aggregation),
                                       make_seed(seed, stream)));
        },
        py::arg("x"), py::arg("y"), py::arg("estimator") = "mixed_ksg", py::arg("k") = 3,
        py::arg("aggregation") = "joint", py::arg("seed") = 0, py::arg("stream") = 0);

  // bounds
  m.def("fano_lower_relaxed", &fano_lower_relaxed, py::arg("h_w_bits"),
        py::arg("dtmi_bits"), py::arg("m"));
  m.def("fano_lower_tight", &fano_lower_tight, py::arg("h_w_bits"), py::arg("dtmi_bits"),
        py::arg("m"));
  m.def("typicality_upper_bound",
        [](const Matrix& cross_mi_bits, const std::vector<double>& prior, int n,
           double epsilon) {
          std::vector<std::string> labels;
          for (std::size_t i = 0; i < prior.size(); ++i) {
            labels.push_back("w" + std::to_string(i));
          }
          const BoundReport r = typicality_upper_bound(
              CrossMIMatrix(cross_mi_bits), StateSpace(labels, prior), n, epsilon);
          return py::make_tuple(r.upper_raw, r.upper_clamped);
        },
        py::arg("cross_mi_bits"), py::arg("prior"), py::arg("n"), py::arg("epsilon"),
        "Returns (upper_raw, upper_clamped)");
  m.def("lossless_condition",
        [](int m_states, int n, const Matrix& averaged_cross_mi_bits, double epsilon) {
          const LosslessReport r =
              lossless_condition(m_states, n, averaged_cross_mi_bits, epsilon);
          py::dict d;
          d["rate_bits"] = r.rate_bits;
          d["threshold_bits"] = r.threshold_bits;
          d["satisfied"] = r.satisfied;
          d["margin_bits"] = r.margin_bits;
          return d;
        },
        py::arg("m"), py::arg("n"), py::arg("averaged_cross_mi_bits"), py::arg("epsilon"));
  m.def("preprocessing_check",
        [](double h_w_bits, double i_x_d_bits) {
          return to_string(preprocessing_check(h_w_bits, i_x_d_bits));
        },
        py::arg("h_w_bits"), py::arg("i_x_d_bits"));

  // channel simulator: BSC repetition workflows exposed compactly
  m.def("simulate_bsc_repetition",
        [](double crossover, int n, const std::string& decoder, double epsilon,
           std::size_t trials, std::uint64_t seed) {
          const StateSpace space = StateSpace::uniform(2);
          const FeatureEncoder enc = build_repetition_encoder({{0}, {1}}, n, 2);
          const DMCModel ch = DMCModel::bsc(crossover);
          DecoderSpec spec = DecoderSpec::ml();
          if (decoder == "typicality") spec = DecoderSpec::typicality(epsilon);
          if (decoder == "nearest_centroid") spec = DecoderSpec::nearest_centroid();
          const MonteCarloResult mc =
              run_monte_carlo(space, enc, ch, spec, trials, make_seed(seed, 0));
          py::dict d;
          d["p_e"] = mc.p_e;
          d["xi"] = mc.xi;
          d["ci_95"] = py::make_tuple(mc.ci_95.lo, mc.ci_95.hi);
          d["trials"] = mc.trials;
          return d;
        },
        py::arg("crossover"), py::arg("n"), py::arg("decoder") = "ml",
        py::arg("epsilon") = kDefaultEpsilon, py::arg("trials") = 10000,
        py::arg("seed") = 0);
  m.def("exact_bsc_repetition_mi",
        [](double crossover, int n) {
          const ChannelMIReport r =
              exact_channel_mi(build_repetition_encoder({{0}, {1}}, n, 2),
                               DMCModel::bsc(crossover), StateSpace::uniform(2));
          return r.total_xy_bits;
        },
        py::arg("crossover"), py::arg("n"));

  // pipelines
  m.def("music_spectrum",
        [](const ComplexMatrix& snapshots, int q, double spacing_m, double wavelength_m,
           int n_sources, double grid_step_rad) {
          const MusicSpectrum s = music_spectrum(
              snapshots, ArrayGeometry{q, spacing_m, wavelength_m}, n_sources,
              grid_step_rad);
          return py::make_tuple(s.angles_rad, s.power);
        },
        py::arg("snapshots"), py::arg("q"), py::arg("spacing_m"), py::arg("wavelength_m"),
        py::arg("n_sources") = 1, py::arg("grid_step_rad") = 0.008726646259971648);
  m.def("steering_vector",
        [](int q, double spacing_m, double wavelength_m, double theta) {
          return steering_vector(ArrayGeometry{q, spacing_m, wavelength_m}, theta);
        },
        py::arg("q"), py::arg("spacing_m"), py::arg("wavelength_m"), py::arg("theta"));
  m.def("angle_to_class",
        [](double theta, int m_classes, double lo, double hi) {
          return angle_to_class(theta, m_classes, {lo, hi});
        },
        py::arg("theta"), py::arg("m_classes"), py::arg("lo") = -1.5707963267948966,
        py::arg("hi") = 1.5707963267948966);
  m.def("knn_classify",
        [](const Matrix& train_features, const std::vector<int>& train_labels,
           const Matrix& test_features, int k) {
          const int m = 1 + *std::max_element(train_labels.begin(), train_labels.end());
          const StateSpace space = StateSpace::uniform(std::max(m, 2));
          const LabeledDataset train(space, train_labels, train_features);
          return knn_classify(train, test_features, k);
        },
        py::arg("train_features"), py::arg("train_labels"), py::arg("test_features"),
        py::arg("k") = 5);
  m.def("cov_detect",
        [](const Matrix& windowed, int window_len, double low, double high) {
          DetectorConfig cfg;
          cfg.window_len = window_len;
          cfg.threshold_low = low;
          cfg.threshold_high = high;
          const CovDetection d = cov_detect(windowed, cfg);
          return py::make_tuple(d.present, d.embedding);
        },
        py::arg("windowed"), py::arg("window_len"), py::arg("low") = 0.935,
        py::arg("high") = 1.065);
  m.def("rssi_detect",
        [](const Matrix& tag_rssi, const std::vector<double>& baseline, double threshold) {
          DetectorConfig cfg;
          cfg.rssi_threshold = threshold;
          const RssiDetection d = rssi_detect(tag_rssi, baseline, cfg);
          return py::make_tuple(d.open, d.mean_differential);
        },
        py::arg("tag_rssi"), py::arg("baseline"), py::arg("threshold") = 2.5);
  m.def("pearson",
        [](const std::vector<double>& a, const std::vector<double>& b) {
          return pearson(a, b).r;
        },
        py::arg("a"), py::arg("b"));

  m.attr("__version__") = "0.1.0";
}
