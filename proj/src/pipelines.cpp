#include "dtmi/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dtmi/infotheory.hpp"

namespace dtmi {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_geometry(const ArrayGeometry& g) {
  if (g.q < 2) throw validation_error("InvalidArguments", "need q >= 2 antennas");
  if (!(g.spacing_m > 0.0) || !(g.wavelength_m > 0.0)) {
    throw validation_error("InvalidArguments", "spacing and wavelength must be > 0");
  }
}
}  // namespace

ComplexVector steering_vector(const ArrayGeometry& geometry, double theta) {
  check_geometry(geometry);
  if (std::abs(theta) > 0.5 * kPi + 1e-12) {
    throw validation_error("OutOfRange", "theta must lie in [-pi/2, pi/2]");
  }
  ComplexVector a(geometry.q);
  const double phase_step =
      -2.0 * kPi * geometry.spacing_m * std::sin(theta) / geometry.wavelength_m;
  for (int p = 0; p < geometry.q; ++p) {
    a(p) = std::polar(1.0, phase_step * p);
  }
  return a;
}

ComplexMatrix simulate_snapshots(const AoAScenario& scenario, double theta_true, Rng& rng) {
  check_geometry(scenario.geometry);
  if (scenario.snapshots < scenario.geometry.q) {
    throw validation_error("InvalidArguments", "need snapshots >= q");
  }
  const ComplexVector a = steering_vector(scenario.geometry, theta_true);
  const double amplitude =
      std::pow(1.0 / std::max(scenario.target_distance_m, 1e-12),
               0.5 * scenario.pathloss_exponent);
  const double noise_sigma =
      std::sqrt(std::pow(10.0, -scenario.snr_db / 10.0) / 2.0);  // per component
  ComplexMatrix snaps(scenario.geometry.q, scenario.snapshots);
  for (int t = 0; t < scenario.snapshots; ++t) {
    const std::complex<double> s = std::polar(1.0, 2.0 * kPi * rng.uniform());
    for (int p = 0; p < scenario.geometry.q; ++p) {
      const std::complex<double> noise(noise_sigma * rng.normal(),
                                       noise_sigma * rng.normal());
      snaps(p, t) = amplitude * a(p) * s + noise;
    }
  }
  return snaps;
}

ComplexMatrix simulate_snapshots(const AoAScenario& scenario, double theta_true,
                                 RngSeed seed) {
  Rng rng(seed);
  return simulate_snapshots(scenario, theta_true, rng);
}

MusicSpectrum music_spectrum(const ComplexMatrix& snapshots, const ArrayGeometry& geometry,
                             int n_sources, double grid_step_rad) {
  check_geometry(geometry);
  const int q = static_cast<int>(snapshots.rows());
  const int t = static_cast<int>(snapshots.cols());
  if (q != geometry.q) {
    throw validation_error("DimensionMismatch", "snapshot rows differ from antenna count");
  }
  if (t < q) throw validation_error("RankDeficient", "need snapshots >= q");
  if (n_sources < 1 || n_sources >= q) {
    throw validation_error("InvalidArguments", "need 1 <= n_sources < q");
  }
  if (!(grid_step_rad > 0.0)) {
    throw validation_error("InvalidArguments", "grid step must be > 0");
  }

  const ComplexMatrix cov = snapshots * snapshots.adjoint() / static_cast<double>(t);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(cov);
  if (eig.info() != Eigen::Success) {
    throw validation_error("RankDeficient", "eigendecomposition failed");
  }
  // Eigenvalues ascend, so the first q - n_sources columns span the noise
  // subspace.
  const ComplexMatrix noise_basis = eig.eigenvectors().leftCols(q - n_sources);

  MusicSpectrum spec;
  for (double theta = -0.5 * kPi; theta <= 0.5 * kPi + 1e-12; theta += grid_step_rad) {
    const double th = std::min(theta, 0.5 * kPi);
    const ComplexVector a = steering_vector(geometry, th);
    const double denom = (noise_basis.adjoint() * a).squaredNorm();
    spec.angles_rad.push_back(th);
    spec.power.push_back(1.0 / std::max(denom, 1e-300));
  }
  return spec;
}

int MusicSpectrum::peak_index() const {
  if (power.empty()) throw validation_error("InvalidArguments", "empty spectrum");
  return static_cast<int>(std::max_element(power.begin(), power.end()) - power.begin());
}

double MusicSpectrum::peak_angle_interpolated() const {
  const int j = peak_index();
  const int last = static_cast<int>(power.size()) - 1;
  if (j == 0 || j == last) return angles_rad[static_cast<std::size_t>(j)];
  const double pm = power[static_cast<std::size_t>(j - 1)];
  const double p0 = power[static_cast<std::size_t>(j)];
  const double pp = power[static_cast<std::size_t>(j + 1)];
  const double denom = pm - 2.0 * p0 + pp;
  double offset = 0.0;
  if (denom != 0.0) offset = std::clamp(0.5 * (pm - pp) / denom, -0.5, 0.5);
  const double step = angles_rad[static_cast<std::size_t>(j)] -
                      angles_rad[static_cast<std::size_t>(j - 1)];
  return angles_rad[static_cast<std::size_t>(j)] + offset * step;
}

int angle_to_class(double theta, int m_classes, std::pair<double, double> angle_range) {
  if (m_classes < 2) throw validation_error("InvalidArguments", "need m >= 2 classes");
  const auto [lo, hi] = angle_range;
  if (!(hi > lo)) throw validation_error("InvalidArguments", "empty angle range");
  if (theta < lo || theta > hi) {
    throw validation_error("OutOfRange", "theta outside the class range");
  }
  if (theta == hi) return m_classes - 1;  // last bin closed
  const double width = (hi - lo) / m_classes;
  int cls = static_cast<int>((theta - lo) / width);
  return std::clamp(cls, 0, m_classes - 1);
}

std::vector<AoAPoint> aoa_sweep(const std::vector<AoAScenario>& scenarios,
                                int trials_per_point, const EstimatorConfig& estimator,
                                RngSeed seed) {
  if (scenarios.size() < 4) {
    throw validation_error("InvalidArguments", "need >= 4 sweep points");
  }
  if (trials_per_point < 10) {
    throw validation_error("InvalidArguments", "need >= 10 trials per point");
  }
  std::vector<AoAPoint> series;
  series.reserve(scenarios.size());
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const AoAScenario& sc = scenarios[s];
    const auto [lo, hi] = sc.angle_range;
    const RngSeed point_seed = derive_substream(seed, s);
    Matrix cls(trials_per_point, 1), est(trials_per_point, 1);
    std::size_t correct = 0;
    for (int t = 0; t < trials_per_point; ++t) {
      Rng rng(derive_substream(point_seed, static_cast<std::uint64_t>(t)));
      const int true_class = rng.uniform_int(sc.m_classes);
      const double width = (hi - lo) / sc.m_classes;
      const double theta = lo + (true_class + rng.uniform()) * width;
      const ComplexMatrix snaps = simulate_snapshots(sc, theta, rng);
      const MusicSpectrum spec = music_spectrum(snaps, sc.geometry, 1);
      const double theta_hat = std::clamp(spec.peak_angle_interpolated(), lo, hi);
      const int decided = angle_to_class(theta_hat, sc.m_classes, sc.angle_range);
      if (decided == true_class) ++correct;
      cls(t, 0) = static_cast<double>(true_class);
      est(t, 0) = theta_hat;
    }
    AoAPoint point;
    point.snr_db = sc.snr_db;
    point.distance_m = sc.target_distance_m;
    point.accuracy = static_cast<double>(correct) / trials_per_point;
    EstimatorConfig cfg = estimator;
    cfg.estimator_id = EstimatorId::mixed_ksg;  // discrete class vs continuous angle
    cfg.aggregation = Aggregation::joint;
    point.dtmi_bits = estimate_dtmi(PairedSamples(cls, est), cfg, point_seed).bits;
    const double h_w = std::log2(static_cast<double>(sc.m_classes));
    point.fano_lower = fano_lower_tight(h_w, point.dtmi_bits, sc.m_classes);
    series.push_back(point);
  }
  return series;
}

std::vector<int> knn_classify(const LabeledDataset& train, const Matrix& test_features,
                              int k) {
  if (train.rows() == 0) throw validation_error("EmptyTrainSet", "no training rows");
  if (k < 1 || k > train.rows()) {
    throw validation_error("InvalidArguments", "need 1 <= k <= train size");
  }
  if (test_features.cols() != train.dim()) {
    throw validation_error("DimensionMismatch", "feature dimensions differ");
  }
  const int m = train.space().size();
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(test_features.rows()));
  std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(train.rows()));
  for (Eigen::Index t = 0; t < test_features.rows(); ++t) {
    for (Eigen::Index r = 0; r < train.rows(); ++r) {
      dist[static_cast<std::size_t>(r)] = {
          (train.features().row(r) - test_features.row(t)).squaredNorm(), r};
    }
    // (distance, row index) ordering makes distance ties deterministic.
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    std::vector<int> votes(static_cast<std::size_t>(m), 0);
    for (int i = 0; i < k; ++i) {
      votes[static_cast<std::size_t>(
          train.label_indices()[static_cast<std::size_t>(dist[static_cast<std::size_t>(i)].second)])] += 1;
    }
    int best = 0;
    for (int c = 1; c < m; ++c) {
      if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
    }
    out.push_back(best);
  }
  return out;
}

namespace {
// Post-shuffle per-class row order; drives both fold assignment and the
// DTMI pairing.
std::vector<std::vector<Eigen::Index>> shuffled_by_class(const LabeledDataset& dataset,
                                                         int folds, RngSeed seed) {
  const int m = dataset.space().size();
  std::vector<std::vector<Eigen::Index>> by_class(static_cast<std::size_t>(m));
  for (Eigen::Index r = 0; r < dataset.rows(); ++r) {
    by_class[static_cast<std::size_t>(dataset.label_indices()[static_cast<std::size_t>(r)])]
        .push_back(r);
  }
  Rng shuffle_rng(derive_substream(seed, 0));
  for (auto& rows : by_class) {
    if (static_cast<int>(rows.size()) < folds) {
      throw validation_error("ClassTooSmall",
                             "every class needs at least `folds` members");
    }
    for (std::size_t i = rows.size(); i > 1; --i) {
      std::swap(rows[i - 1], rows[static_cast<std::size_t>(shuffle_rng.uniform_int(
                                 static_cast<int>(i)))]);
    }
  }
  return by_class;
}
}  // namespace

std::vector<std::vector<Eigen::Index>> stratified_folds(const LabeledDataset& dataset,
                                                        int folds, RngSeed seed) {
  if (folds < 2) throw validation_error("InvalidArguments", "need >= 2 folds");
  const auto by_class = shuffled_by_class(dataset, folds, seed);
  std::vector<std::vector<Eigen::Index>> assignment(static_cast<std::size_t>(folds));
  for (const auto& rows : by_class) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      assignment[i % static_cast<std::size_t>(folds)].push_back(rows[i]);
    }
  }
  return assignment;
}

CrossValidationReport cross_validate(const LabeledDataset& dataset, int folds, int k,
                                     const EstimatorConfig& estimator, RngSeed seed,
                                     double epsilon) {
  if (folds < 2) throw validation_error("InvalidArguments", "need >= 2 folds");
  const int m = dataset.space().size();
  const Eigen::Index d = dataset.dim();
  const auto by_class = shuffled_by_class(dataset, folds, seed);

  CrossValidationReport report;
  double per_dim_sum_mean = 0.0;
  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> train_rows, test_rows;
    std::vector<std::vector<Eigen::Index>> train_by_class(static_cast<std::size_t>(m));
    std::vector<std::vector<Eigen::Index>> test_by_class(static_cast<std::size_t>(m));
    for (int c = 0; c < m; ++c) {
      const auto& rows = by_class[static_cast<std::size_t>(c)];
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (static_cast<int>(i % static_cast<std::size_t>(folds)) == f) {
          test_rows.push_back(rows[i]);
          test_by_class[static_cast<std::size_t>(c)].push_back(rows[i]);
        } else {
          train_rows.push_back(rows[i]);
          train_by_class[static_cast<std::size_t>(c)].push_back(rows[i]);
        }
      }
    }

    Matrix train_x(static_cast<Eigen::Index>(train_rows.size()), d);
    std::vector<int> train_labels;
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
      train_x.row(static_cast<Eigen::Index>(i)) = dataset.features().row(train_rows[i]);
      train_labels.push_back(
          dataset.label_indices()[static_cast<std::size_t>(train_rows[i])]);
    }
    LabeledDataset train(dataset.space(), train_labels, train_x);

    Matrix test_x(static_cast<Eigen::Index>(test_rows.size()), d);
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      test_x.row(static_cast<Eigen::Index>(i)) = dataset.features().row(test_rows[i]);
    }
    const std::vector<int> predicted = knn_classify(train, test_x, k);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      if (predicted[i] ==
          dataset.label_indices()[static_cast<std::size_t>(test_rows[i])]) {
        ++correct;
      }
    }

    // Train-as-X, test-as-Y pairing, truncated per class to the shorter side.
    std::vector<Eigen::Index> px, py;
    for (int c = 0; c < m; ++c) {
      const auto& tr = train_by_class[static_cast<std::size_t>(c)];
      const auto& te = test_by_class[static_cast<std::size_t>(c)];
      const std::size_t count = std::min(tr.size(), te.size());
      for (std::size_t i = 0; i < count; ++i) {
        px.push_back(tr[i]);
        py.push_back(te[i]);
      }
    }
    Matrix pair_x(static_cast<Eigen::Index>(px.size()), d);
    Matrix pair_y(static_cast<Eigen::Index>(py.size()), d);
    for (std::size_t i = 0; i < px.size(); ++i) {
      pair_x.row(static_cast<Eigen::Index>(i)) = dataset.features().row(px[i]);
      pair_y.row(static_cast<Eigen::Index>(i)) = dataset.features().row(py[i]);
    }
    PairedSamples paired(pair_x, pair_y);
    const RngSeed fold_seed = derive_substream(seed, static_cast<std::uint64_t>(f) + 1);

    FoldResult fold;
    fold.accuracy = static_cast<double>(correct) / static_cast<double>(test_rows.size());
    fold.dtmi_bits = estimate_dtmi(paired, estimator, fold_seed).bits;
    EstimatorConfig per_dim = estimator;
    per_dim.aggregation = Aggregation::per_dimension_sum;
    fold.per_dim_sum_bits = estimate_dtmi(paired, per_dim, fold_seed).bits;
    per_dim_sum_mean += fold.per_dim_sum_bits;
    report.folds.push_back(fold);
  }

  per_dim_sum_mean /= static_cast<double>(folds);
  for (const auto& f : report.folds) {
    report.mean_accuracy += f.accuracy;
    report.mean_dtmi_bits += f.dtmi_bits;
  }
  report.mean_accuracy /= static_cast<double>(folds);
  report.mean_dtmi_bits /= static_cast<double>(folds);

  const double averaged = per_dim_sum_mean / static_cast<double>(d);
  Matrix cross = Matrix::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    for (int c = 0; c < m; ++c) {
      if (j != c) cross(j, c) = averaged;
    }
  }
  report.lossless = lossless_condition(m, static_cast<int>(d), cross, epsilon);
  return report;
}

namespace {
std::pair<double, double> window_mean_sd(const Matrix& rows, Eigen::Index r,
                                         Eigen::Index begin, Eigen::Index len) {
  double mean = 0.0;
  for (Eigen::Index t = 0; t < len; ++t) mean += rows(r, begin + t);
  mean /= static_cast<double>(len);
  double ss = 0.0;
  for (Eigen::Index t = 0; t < len; ++t) {
    const double d = rows(r, begin + t) - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / static_cast<double>(len - 1))};
}
}  // namespace

CovDetection cov_detect(const Matrix& windowed_samples, const DetectorConfig& config) {
  if (config.window_len < 2) {
    throw validation_error("WindowTooShort", "window length must be >= 2");
  }
  if (!(config.threshold_low < config.threshold_high)) {
    throw validation_error("InvalidArguments", "threshold_low must be < threshold_high");
  }
  const Eigen::Index sub = windowed_samples.rows();
  if (sub < 1) throw validation_error("InvalidArguments", "need >= 1 subcarrier");
  if (windowed_samples.cols() < 2 * config.window_len) {
    throw validation_error("WindowTooShort",
                           "need two consecutive windows of window_len columns");
  }

  double ratio_sum = 0.0;
  for (Eigen::Index r = 0; r < sub; ++r) {
    const auto [mean_prev, sd_prev] = window_mean_sd(windowed_samples, r, 0,
                                                     config.window_len);
    const auto [mean_cur, sd_cur] = window_mean_sd(windowed_samples, r,
                                                   config.window_len, config.window_len);
    if (mean_prev == 0.0 || mean_cur == 0.0) {
      throw validation_error("ZeroMeanSubcarrier",
                             "subcarrier " + std::to_string(r) + " has a zero-mean window");
    }
    const double cov_prev = sd_prev / mean_prev;
    const double cov_cur = sd_cur / mean_cur;
    double ratio;
    if (cov_prev == 0.0) {
      // Two deterministic windows have equal (zero) variation; otherwise the
      // current window's onset of variation dominates.
      ratio = (cov_cur == 0.0) ? 1.0 : std::numeric_limits<double>::infinity();
    } else {
      ratio = std::abs(cov_cur / cov_prev);
    }
    ratio_sum += ratio;
  }

  CovDetection out;
  out.embedding = ratio_sum / static_cast<double>(sub);
  out.present = !(out.embedding >= config.threshold_low &&
                  out.embedding <= config.threshold_high);
  return out;
}

RssiDetection rssi_detect(const Matrix& tag_rssi, const std::vector<double>& baseline,
                          const DetectorConfig& config) {
  const Eigen::Index tags = tag_rssi.rows();
  if (tags < 1) throw validation_error("NoTags", "need >= 1 tag row");
  if (static_cast<Eigen::Index>(baseline.size()) != tags) {
    throw validation_error("DimensionMismatch", "one baseline value per tag required");
  }
  if (tag_rssi.cols() < 1) {
    throw validation_error("InvalidArguments", "need >= 1 time sample");
  }
  double sum = 0.0;
  for (Eigen::Index r = 0; r < tags; ++r) {
    double tag_mean = 0.0;
    for (Eigen::Index t = 0; t < tag_rssi.cols(); ++t) {
      tag_mean += std::abs(tag_rssi(r, t) - baseline[static_cast<std::size_t>(r)]);
    }
    sum += tag_mean / static_cast<double>(tag_rssi.cols());
  }
  RssiDetection out;
  out.mean_differential = sum / static_cast<double>(tags);
  out.open = out.mean_differential > config.rssi_threshold;
  return out;
}

}  // namespace dtmi
