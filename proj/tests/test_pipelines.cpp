#include <doctest.h>

#include <cmath>
#include <set>

#include "dtmi/pipelines.hpp"
#include "helpers.hpp"

using namespace dtmi;
using dtmi::testing::median;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfPi = 0.5 * kPi;

ArrayGeometry half_wavelength(int q) { return ArrayGeometry{q, 0.03, 0.06}; }

AoAScenario scenario(double snr_db, int q = 3) {
  AoAScenario sc;
  sc.geometry = half_wavelength(q);
  sc.snr_db = snr_db;
  sc.snapshots = 16;
  sc.m_classes = 9;
  return sc;
}

// Synthetic 9-class, 30-feature dataset: class c puts a distinct, well
// separated mean into every dimension.
LabeledDataset separable_dataset(int per_class, double noise, RngSeed seed) {
  const int m = 9, d = 30;
  Rng rng(seed);
  std::vector<std::string> labels_all;
  Matrix features(per_class * m, d);
  Eigen::Index row = 0;
  for (int c = 0; c < m; ++c) {
    for (int i = 0; i < per_class; ++i, ++row) {
      labels_all.push_back("c" + std::to_string(c));
      for (int f = 0; f < d; ++f) {
        const double mean = 10.0 * c + 3.0 * std::sin(0.7 * f * (c + 1));
        features(row, f) = mean + noise * rng.normal();
      }
    }
  }
  std::vector<std::string> distinct;
  std::vector<double> prior;
  for (int c = 0; c < m; ++c) {
    distinct.push_back("c" + std::to_string(c));
    prior.push_back(1.0 / m);
  }
  return LabeledDataset(StateSpace(distinct, prior), labels_all, features);
}
}  // namespace

TEST_SUITE("pipelines") {

TEST_CASE("steering vector: broadside, endfire phases and conjugate symmetry") {
  const ArrayGeometry g = half_wavelength(3);
  const ComplexVector broadside = steering_vector(g, 0.0);
  for (int p = 0; p < 3; ++p) {
    CHECK(broadside(p).real() == doctest::Approx(1.0));
    CHECK(broadside(p).imag() == doctest::Approx(0.0));
  }
  // spacing = lambda/2 at theta = pi/2: phases 0, -pi, -2pi.
  const ComplexVector endfire = steering_vector(g, kHalfPi);
  CHECK(std::arg(endfire(0)) == doctest::Approx(0.0));
  CHECK(std::abs(endfire(1) - std::complex<double>(-1.0, 0.0)) < 1e-9);
  CHECK(std::abs(endfire(2) - std::complex<double>(1.0, 0.0)) < 1e-9);

  Rng rng(RngSeed{61, 0});
  for (int t = 0; t < 50; ++t) {
    const double theta = rng.uniform(-kHalfPi, kHalfPi);
    const ComplexVector plus = steering_vector(g, theta);
    const ComplexVector minus = steering_vector(g, -theta);
    for (int p = 0; p < 3; ++p) {
      CHECK(std::abs(minus(p) - std::conj(plus(p))) < 1e-12);
      CHECK(std::abs(plus(p)) == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("snapshot simulation: noiseless alignment, pathloss and noise floor") {
  AoAScenario quiet = scenario(300.0);
  const double theta = 0.35;
  const ComplexMatrix snaps = simulate_snapshots(quiet, theta, RngSeed{62, 0});
  const ComplexVector a = steering_vector(quiet.geometry, theta);
  for (int t = 0; t < quiet.snapshots; ++t) {
    // Every column is proportional to the steering vector.
    const std::complex<double> scale = snaps(0, t) / a(0);
    for (int p = 1; p < 3; ++p) {
      CHECK(std::abs(snaps(p, t) - scale * a(p)) < 1e-9);
    }
    CHECK(std::abs(scale) == doctest::Approx(1.0).epsilon(1e-9));
  }

  AoAScenario far = quiet;
  far.target_distance_m = 2.0;
  far.pathloss_exponent = 2.0;
  const ComplexMatrix far_snaps = simulate_snapshots(far, theta, RngSeed{62, 1});
  CHECK(std::abs(far_snaps(0, 0)) == doctest::Approx(0.5).epsilon(1e-9));

  // Signal amplitude ~ 0: sample covariance approaches sigma^2 I.
  AoAScenario noise_only = scenario(0.0);
  noise_only.snapshots = 20000;
  noise_only.target_distance_m = 1e9;  // kills the signal through pathloss
  const ComplexMatrix nn = simulate_snapshots(noise_only, 0.0, RngSeed{62, 2});
  const ComplexMatrix cov = nn * nn.adjoint() / static_cast<double>(nn.cols());
  for (int a1 = 0; a1 < 3; ++a1) {
    for (int b = 0; b < 3; ++b) {
      const double expected = a1 == b ? 1.0 : 0.0;  // sigma^2 = 1 at 0 dB
      CHECK(std::abs(cov(a1, b) - expected) < 0.05);
    }
  }
}

TEST_CASE("MUSIC: noiseless single source peaks within one grid step") {
  Rng rng(RngSeed{63, 0});
  for (int q : {3, 4, 8}) {
    AoAScenario sc = scenario(300.0, q);
    for (int t = 0; t < 15; ++t) {
      const double theta = rng.uniform(-0.98 * kHalfPi, 0.98 * kHalfPi);
      const ComplexMatrix snaps =
          simulate_snapshots(sc, theta, RngSeed{63, static_cast<std::uint64_t>(10 * q + t)});
      const MusicSpectrum spec = music_spectrum(snaps, sc.geometry, 1);
      const double peak = spec.angles_rad[static_cast<std::size_t>(spec.peak_index())];
      CHECK(std::abs(peak - theta) <= 0.008726646259971648 + 1e-12);
    }
  }
}

TEST_CASE("MUSIC: mirrored source peaks at the mirrored angle") {
  AoAScenario sc = scenario(300.0);
  const double theta = 0.6;
  const ComplexMatrix plus = simulate_snapshots(sc, theta, RngSeed{64, 0});
  const ComplexMatrix minus = simulate_snapshots(sc, -theta, RngSeed{64, 1});
  const MusicSpectrum sp = music_spectrum(plus, sc.geometry, 1);
  const MusicSpectrum sm = music_spectrum(minus, sc.geometry, 1);
  const double peak_p = sp.angles_rad[static_cast<std::size_t>(sp.peak_index())];
  const double peak_m = sm.angles_rad[static_cast<std::size_t>(sm.peak_index())];
  CHECK(std::abs(peak_p + peak_m) <= 2 * 0.008726646259971648);
}

TEST_CASE("MUSIC: noise-only spectrum is flat") {
  std::vector<double> ratios;
  for (std::uint64_t s = 0; s < 9; ++s) {
    AoAScenario sc = scenario(0.0);
    sc.snapshots = 1000;
    sc.target_distance_m = 1e9;
    const ComplexMatrix snaps = simulate_snapshots(sc, 0.1, RngSeed{65, s});
    const MusicSpectrum spec = music_spectrum(snaps, sc.geometry, 1);
    const double mx = *std::max_element(spec.power.begin(), spec.power.end());
    const double mn = *std::min_element(spec.power.begin(), spec.power.end());
    ratios.push_back(mx / mn);
  }
  CHECK(median(ratios) < 10.0);
}

TEST_CASE("MUSIC input guards") {
  AoAScenario sc = scenario(10.0);
  const ComplexMatrix snaps = simulate_snapshots(sc, 0.0, RngSeed{66, 0});
  CHECK_THROWS_WITH_AS(music_spectrum(snaps.leftCols(2), sc.geometry, 1),
                       doctest::Contains("RankDeficient"), Error);
  CHECK_THROWS_WITH_AS(music_spectrum(snaps, sc.geometry, 3),
                       doctest::Contains("InvalidArguments"), Error);

  AoAScenario few = sc;
  few.snapshots = 2;  // fewer than q
  CHECK_THROWS_WITH_AS((void)simulate_snapshots(few, 0.0, RngSeed{66, 1}),
                       doctest::Contains("InvalidArguments"), Error);
  CHECK_THROWS_WITH_AS((void)steering_vector(sc.geometry, 2.2),
                       doctest::Contains("OutOfRange"), Error);
  CHECK(ArrayGeometry{3, 0.03, 0.06}.unambiguous());
  CHECK(!ArrayGeometry{3, 0.04, 0.06}.unambiguous());
}

TEST_CASE("angle_to_class binning") {
  const std::pair<double, double> range{-kHalfPi, kHalfPi};
  CHECK(angle_to_class(-0.1, 2, range) == 0);
  CHECK(angle_to_class(kHalfPi, 2, range) == 1);   // boundary closure
  CHECK(angle_to_class(0.0, 9, range) == 4);       // middle bin
  CHECK(angle_to_class(-kHalfPi, 9, range) == 0);
  CHECK_THROWS_WITH_AS(angle_to_class(2.0, 9, range), doctest::Contains("OutOfRange"),
                       Error);
}

TEST_CASE("aoa_sweep: deterministic, monotone in SNR, near-perfect at high SNR") {
  std::vector<AoAScenario> points;
  for (double snr : {-10.0, 0.0, 10.0, 200.0}) points.push_back(scenario(snr));
  EstimatorConfig cfg;
  cfg.k = 3;

  const auto run1 = aoa_sweep(points, 600, cfg, RngSeed{67, 0});
  const auto run2 = aoa_sweep(points, 600, cfg, RngSeed{67, 0});
  REQUIRE(run1.size() == 4);
  for (std::size_t i = 0; i < run1.size(); ++i) {
    CHECK(run1[i].accuracy == run2[i].accuracy);
    CHECK(run1[i].dtmi_bits == run2[i].dtmi_bits);
  }

  // Accuracy should climb with SNR (by a clear margin across this range).
  CHECK(run1[0].accuracy < run1[2].accuracy);
  CHECK(run1[3].accuracy >= 0.99);
  CHECK(run1[3].dtmi_bits >= std::log2(9.0) - 0.15);
  CHECK(run1[3].dtmi_bits <= std::log2(9.0) + 0.15);
  CHECK(run1[3].fano_lower <= run1[0].fano_lower);

  CHECK_THROWS_WITH_AS(aoa_sweep({points[0], points[1]}, 600, cfg, RngSeed{}),
                       doctest::Contains("InvalidArguments"), Error);
}

TEST_CASE("knn_classify basics") {
  Matrix f(5, 1);
  f << 0.0, 0.1, 0.2, 10.0, 10.1;
  const StateSpace space = StateSpace::uniform(2);
  const LabeledDataset train(space, std::vector<int>{0, 0, 0, 1, 1}, f);

  Matrix probe(1, 1);
  probe << 0.1;
  CHECK(knn_classify(train, probe, 1) == std::vector<int>{0});
  probe << 9.9;
  CHECK(knn_classify(train, probe, 3) == std::vector<int>{1});

  const LabeledDataset constant(space, std::vector<int>{1, 1, 1, 1, 1}, f);
  probe << 4.0;
  CHECK(knn_classify(constant, probe, 5) == std::vector<int>{1});

  const LabeledDataset empty(space, std::vector<int>{}, Matrix(0, 1));
  CHECK_THROWS_WITH_AS(knn_classify(empty, probe, 1), doctest::Contains("EmptyTrainSet"),
                       Error);
}

TEST_CASE("knn_classify separates two well-spaced Gaussian clusters") {
  Rng rng(RngSeed{68, 0});
  Matrix f(200, 2);
  std::vector<int> labels;
  for (int i = 0; i < 200; ++i) {
    const int c = i < 100 ? 0 : 1;
    labels.push_back(c);
    f(i, 0) = 10.0 * c + rng.normal();
    f(i, 1) = -10.0 * c + rng.normal();
  }
  const LabeledDataset train(StateSpace::uniform(2), labels, f);
  Matrix probes(40, 2);
  std::vector<int> want;
  for (int i = 0; i < 40; ++i) {
    const int c = i % 2;
    want.push_back(c);
    probes(i, 0) = 10.0 * c + rng.normal();
    probes(i, 1) = -10.0 * c + rng.normal();
  }
  CHECK(knn_classify(train, probes, 5) == want);
}

TEST_CASE("stratified folds are disjoint, covering and balanced per class") {
  const LabeledDataset data = separable_dataset(11, 0.5, RngSeed{69, 0});
  const auto folds = stratified_folds(data, 4, RngSeed{69, 1});
  REQUIRE(folds.size() == 4);
  std::set<Eigen::Index> seen;
  for (const auto& fold : folds) {
    for (Eigen::Index r : fold) {
      CHECK(!seen.count(r));
      seen.insert(r);
    }
  }
  CHECK(static_cast<Eigen::Index>(seen.size()) == data.rows());
  for (int c = 0; c < 9; ++c) {
    std::vector<int> per_fold;
    for (const auto& fold : folds) {
      int count = 0;
      for (Eigen::Index r : fold) {
        if (data.label_indices()[static_cast<std::size_t>(r)] == c) ++count;
      }
      per_fold.push_back(count);
    }
    const auto [mn, mx] = std::minmax_element(per_fold.begin(), per_fold.end());
    CHECK(*mx - *mn <= 1);
  }
}

TEST_CASE("cross_validate: separable data classifies and rates correctly") {
  const LabeledDataset data = separable_dataset(20, 0.3, RngSeed{70, 0});
  EstimatorConfig cfg;
  cfg.estimator_id = EstimatorId::mixed_ksg;
  cfg.k = 3;
  const CrossValidationReport r = cross_validate(data, 5, 5, cfg, RngSeed{70, 1});
  CHECK(r.mean_accuracy >= 0.99);
  CHECK(r.lossless.rate_bits == doctest::Approx(0.10566416671474375).epsilon(1e-9));
  CHECK(r.folds.size() == 5);
  CHECK(r.lossless.satisfied);
}

TEST_CASE("cross_validate: label shuffling destroys accuracy and information") {
  const LabeledDataset data = separable_dataset(20, 0.3, RngSeed{71, 0});
  Rng rng(RngSeed{71, 1});
  std::vector<int> shuffled = data.label_indices();
  for (std::size_t i = shuffled.size(); i > 1; --i) {
    std::swap(shuffled[i - 1], shuffled[static_cast<std::size_t>(rng.uniform_int(
                                   static_cast<int>(i)))]);
  }
  const LabeledDataset null_data(data.space(), shuffled, data.features());
  EstimatorConfig cfg;
  cfg.estimator_id = EstimatorId::mixed_ksg;
  cfg.k = 3;
  const CrossValidationReport r = cross_validate(null_data, 5, 5, cfg, RngSeed{71, 2});
  // Chance level 1/9 with a 3 sigma allowance over 180 test decisions/fold.
  const double sigma = std::sqrt((1.0 / 9.0) * (8.0 / 9.0) / 180.0);
  CHECK(r.mean_accuracy <= 1.0 / 9.0 + 3.0 * sigma);
  CHECK(r.mean_dtmi_bits <= 0.1);

  CHECK_THROWS_WITH_AS(cross_validate(separable_dataset(3, 0.3, RngSeed{71, 3}), 5, 3,
                                      cfg, RngSeed{}),
                       doctest::Contains("ClassTooSmall"), Error);
}

TEST_CASE("detector defaults carry the published thresholds") {
  const DetectorConfig defaults;
  CHECK(defaults.threshold_low == 0.935);
  CHECK(defaults.threshold_high == 1.065);
  CHECK(defaults.rssi_threshold == 2.5);
}

TEST_CASE("cov_detect: ratio arithmetic and thresholds") {
  const DetectorConfig config{4, 0.935, 1.065, 2.5};
  Matrix samples(2, 8);
  samples << 1.0, 2.0, 3.0, 4.0, 1.0, 2.0, 3.0, 4.0,
             5.0, 6.0, 7.0, 8.0, 5.0, 6.0, 7.0, 8.0;
  const CovDetection same = cov_detect(samples, config);
  CHECK(same.embedding == doctest::Approx(1.0));
  CHECK(!same.present);  // y = 1 inside [0.935, 1.065]

  // Second window: equal means, variance scaled by 4 (sd by 2).
  Matrix scaled(1, 8);
  scaled << 9.0, 11.0, 9.0, 11.0, 8.0, 12.0, 8.0, 12.0;
  const CovDetection moved = cov_detect(scaled, config);
  CHECK(moved.embedding == doctest::Approx(2.0));
  CHECK(moved.present);

  Matrix zero_mean(1, 8);
  zero_mean << -1.0, 1.0, -1.0, 1.0, 2.0, 2.0, 2.0, 2.0;
  CHECK_THROWS_WITH_AS(cov_detect(zero_mean, config),
                       doctest::Contains("ZeroMeanSubcarrier"), Error);
  CHECK_THROWS_WITH_AS(cov_detect(Matrix::Ones(1, 6), config),
                       doctest::Contains("WindowTooShort"), Error);
}

TEST_CASE("rssi_detect: differential averaging") {
  const DetectorConfig config{4, 0.935, 1.065, 2.5};
  Matrix flat(2, 3);
  flat << 5.0, 5.0, 5.0, 7.0, 7.0, 7.0;
  const RssiDetection closed = rssi_detect(flat, {5.0, 7.0}, config);
  CHECK(closed.mean_differential == doctest::Approx(0.0));
  CHECK(!closed.open);

  Matrix single(1, 1);
  single << 8.0;
  const RssiDetection open1 = rssi_detect(single, {5.0}, config);
  CHECK(open1.mean_differential == doctest::Approx(3.0));
  CHECK(open1.open);

  Matrix three(3, 1);
  three << 0.0, 0.0, 9.0;
  const RssiDetection open3 = rssi_detect(three, {0.0, 0.0, 0.0}, config);
  CHECK(open3.mean_differential == doctest::Approx(3.0));
  CHECK(open3.open);

  CHECK_THROWS_WITH_AS(rssi_detect(Matrix(0, 1), {}, config), doctest::Contains("NoTags"),
                       Error);
}

}  // TEST_SUITE
