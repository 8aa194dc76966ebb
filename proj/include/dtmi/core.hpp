#ifndef DTMI_CORE_HPP_
#define DTMI_CORE_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dtmi/error.hpp"
#include "dtmi/rng.hpp"

namespace dtmi {

using Matrix = Eigen::MatrixXd;

inline constexpr double kPriorTolerance = 1e-9;
inline constexpr std::size_t kMaxRows = 1000000;  // desk scale guard

// The m sensing states with their prior probabilities. Immutable after
// construction; priors within kPriorTolerance of 1 are re-normalized.
class StateSpace {
 public:
  StateSpace(std::vector<std::string> labels, std::vector<double> prior);

  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<double>& prior() const { return prior_; }
  double prior(int i) const { return prior_[static_cast<std::size_t>(i)]; }
  const std::string& label(int i) const { return labels_[static_cast<std::size_t>(i)]; }

  // Index of a label, or nullopt.
  std::optional<int> index_of(const std::string& label) const;

  // H(W) in bits.
  double entropy_bits() const;

  static StateSpace uniform(int m);

 private:
  std::vector<std::string> labels_;
  std::vector<double> prior_;
};

inline StateSpace validate_state_space(std::vector<std::string> labels,
                                       std::vector<double> prior) {
  return StateSpace(std::move(labels), std::move(prior));
}

// N aligned rows of x (N x d_x) and y (N x d_y) observations.
class PairedSamples {
 public:
  PairedSamples(Matrix x, Matrix y);

  const Matrix& x() const { return x_; }
  const Matrix& y() const { return y_; }
  Eigen::Index rows() const { return x_.rows(); }

 private:
  Matrix x_;
  Matrix y_;
};

// N labeled feature rows tied to a StateSpace.
class LabeledDataset {
 public:
  LabeledDataset(StateSpace space, std::vector<int> label_indices, Matrix features);
  LabeledDataset(StateSpace space, const std::vector<std::string>& labels, Matrix features);

  const StateSpace& space() const { return space_; }
  const std::vector<int>& label_indices() const { return labels_; }
  const Matrix& features() const { return features_; }
  Eigen::Index rows() const { return features_.rows(); }
  Eigen::Index dim() const { return features_.cols(); }

 private:
  StateSpace space_;
  std::vector<int> labels_;
  Matrix features_;
};

enum class EstimatorId { plugin, ksg1, ksg2, mixed_ksg };

std::string to_string(EstimatorId id);
EstimatorId estimator_from_string(const std::string& name);

// A mutual-information value in bits with its pre-clamp raw value.
struct MIEstimate {
  double bits = 0.0;      // max(raw_bits, 0)
  double raw_bits = 0.0;
  EstimatorId estimator_id = EstimatorId::plugin;
  std::optional<int> k;   // neighbor count, absent for plugin
  std::size_t n_samples = 0;
  bool clamped = false;   // raw_bits < 0

  static MIEstimate make(double raw_bits, EstimatorId id, std::optional<int> k,
                         std::size_t n_samples);
};

// Theorem level error bounds for one (H(W), DTMI, n, m, epsilon) input set.
struct BoundReport {
  double lower_relaxed = 0.0;
  double lower_tight = 0.0;
  double upper_raw = 0.0;
  double upper_clamped = 0.0;
  double epsilon = 0.0;
  int n = 0;
  int m = 0;
  double h_w_bits = 0.0;
  double dtmi_bits = 0.0;
};

}  // namespace dtmi

#endif  // DTMI_CORE_HPP_
