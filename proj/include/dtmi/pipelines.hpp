#ifndef DTMI_PIPELINES_HPP_
#define DTMI_PIPELINES_HPP_

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "dtmi/bounds.hpp"
#include "dtmi/core.hpp"
#include "dtmi/knn_mi.hpp"
#include "dtmi/rng.hpp"

namespace dtmi {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

struct ArrayGeometry {
  int q = 3;                  // receive antenna count
  double spacing_m = 0.03;
  double wavelength_m = 0.06;

  // Half-wavelength or tighter spacing keeps the scan unambiguous.
  bool unambiguous() const { return spacing_m <= 0.5 * wavelength_m; }
};

struct AoAScenario {
  ArrayGeometry geometry;
  double snr_db = 10.0;              // per-snapshot SNR at 1 m
  int snapshots = 16;
  int m_classes = 9;
  std::pair<double, double> angle_range{-1.5707963267948966, 1.5707963267948966};
  double target_distance_m = 1.0;
  double pathloss_exponent = 2.0;
};

struct DetectorConfig {
  int window_len = 50;               // samples per time window
  double threshold_low = 0.935;      // CoV detector "absent" band
  double threshold_high = 1.065;
  double rssi_threshold = 2.5;       // mean differential for "open"
};

struct MusicSpectrum {
  std::vector<double> angles_rad;
  std::vector<double> power;

  int peak_index() const;
  // Grid peak with parabolic refinement between neighboring grid points.
  double peak_angle_interpolated() const;
};

struct AoAPoint {
  double snr_db = 0.0;
  double distance_m = 0.0;
  double accuracy = 0.0;
  double dtmi_bits = 0.0;
  double fano_lower = 0.0;
};

struct CovDetection {
  bool present = false;
  double embedding = 0.0;  // y, the mean CoV ratio
};

struct RssiDetection {
  bool open = false;
  double mean_differential = 0.0;
};

struct FoldResult {
  double accuracy = 0.0;
  double dtmi_bits = 0.0;          // aggregated per the estimator config
  double per_dim_sum_bits = 0.0;   // sum_i I(X_i;Y_i) feeding the rate test
};

struct CrossValidationReport {
  std::vector<FoldResult> folds;
  double mean_accuracy = 0.0;
  double mean_dtmi_bits = 0.0;
  LosslessReport lossless;
};

// Uniform linear array response a_p = exp(-j 2 pi p d sin(theta) / lambda).
ComplexVector steering_vector(const ArrayGeometry& geometry, double theta);

// Point-source snapshots: amplitude * a(theta) * s_t plus circular complex
// Gaussian noise; unit signal power at 1 m.
ComplexMatrix simulate_snapshots(const AoAScenario& scenario, double theta_true,
                                 RngSeed seed);
ComplexMatrix simulate_snapshots(const AoAScenario& scenario, double theta_true, Rng& rng);

MusicSpectrum music_spectrum(const ComplexMatrix& snapshots, const ArrayGeometry& geometry,
                             int n_sources,
                             double grid_step_rad = 0.008726646259971648 /* 0.5 deg */);

// Uniform binning over the range; left-closed right-open, last bin closed.
int angle_to_class(double theta, int m_classes, std::pair<double, double> angle_range);

// Per scenario point: Monte Carlo classification accuracy, mixed-kNN DTMI
// between true class and estimated angle, and the tight Fano lower bound.
std::vector<AoAPoint> aoa_sweep(const std::vector<AoAScenario>& scenarios,
                                int trials_per_point, const EstimatorConfig& estimator,
                                RngSeed seed);

// Euclidean k-NN with majority vote; label ties resolve to the smallest
// label index, distance ties to the smaller row index.
std::vector<int> knn_classify(const LabeledDataset& train, const Matrix& test_features,
                              int k);

// Disjoint, covering, per-class stratified fold assignment. Row order inside
// each class follows the seeded shuffle that also drives the DTMI pairing.
std::vector<std::vector<Eigen::Index>> stratified_folds(const LabeledDataset& dataset,
                                                        int folds, RngSeed seed);

// Stratified k-fold cross-validation with the train-as-X / test-as-Y DTMI
// pairing: per class, post-shuffle index-aligned rows truncated to the
// shorter side.
CrossValidationReport cross_validate(const LabeledDataset& dataset, int folds, int k,
                                     const EstimatorConfig& estimator,
                                     RngSeed seed = RngSeed{},
                                     double epsilon = kDefaultEpsilon);

// Coefficient-of-variation presence detector over two consecutive windows.
CovDetection cov_detect(const Matrix& windowed_samples, const DetectorConfig& config);

// Differential-RSSI door state detector.
RssiDetection rssi_detect(const Matrix& tag_rssi, const std::vector<double>& baseline,
                          const DetectorConfig& config);

}  // namespace dtmi

#endif  // DTMI_PIPELINES_HPP_
