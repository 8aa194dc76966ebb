#include "dtmi/core.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "dtmi/infotheory.hpp"

namespace dtmi {

StateSpace::StateSpace(std::vector<std::string> labels, std::vector<double> prior)
    : labels_(std::move(labels)), prior_(std::move(prior)) {
  if (labels_.size() < 2) {
    throw validation_error("TooFewStates", "need m >= 2 states, got " +
                                               std::to_string(labels_.size()));
  }
  if (labels_.size() != prior_.size()) {
    throw validation_error("PriorNotNormalized",
                           "label and prior counts differ");
  }
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) {
      throw validation_error("DuplicateLabel", "label '" + l + "' repeats");
    }
  }
  double sum = 0.0;
  for (double p : prior_) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw validation_error("PriorNotNormalized",
                             "prior entries must lie in [0,1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kPriorTolerance) {
    throw validation_error("PriorNotNormalized",
                           "prior sums to " + std::to_string(sum));
  }
  for (double& p : prior_) p /= sum;
}

std::optional<int> StateSpace::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<int>(it - labels_.begin());
}

double StateSpace::entropy_bits() const { return entropy(DiscreteDistribution(prior_)); }

StateSpace StateSpace::uniform(int m) {
  std::vector<std::string> labels;
  std::vector<double> prior;
  for (int i = 0; i < m; ++i) {
    labels.push_back("w" + std::to_string(i));
    prior.push_back(1.0 / m);
  }
  return StateSpace(std::move(labels), std::move(prior));
}

namespace {
void check_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw validation_error("NonFiniteEntry",
                           std::string(what) + " contains a non-finite value");
  }
}
}  // namespace

PairedSamples::PairedSamples(Matrix x, Matrix y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.rows() != y_.rows()) {
    throw validation_error("RowCountMismatch",
                           "x has " + std::to_string(x_.rows()) + " rows, y has " +
                               std::to_string(y_.rows()));
  }
  if (x_.rows() < 1) throw validation_error("EmptySamples", "need N >= 1 rows");
  if (static_cast<std::size_t>(x_.rows()) > kMaxRows) {
    throw validation_error("TooManyRows", "row count exceeds desk-scale guard");
  }
  check_finite(x_, "x");
  check_finite(y_, "y");
}

LabeledDataset::LabeledDataset(StateSpace space, std::vector<int> label_indices,
                               Matrix features)
    : space_(std::move(space)), labels_(std::move(label_indices)),
      features_(std::move(features)) {
  if (static_cast<Eigen::Index>(labels_.size()) != features_.rows()) {
    throw validation_error("RowCountMismatch", "label and feature row counts differ");
  }
  if (static_cast<std::size_t>(features_.rows()) > kMaxRows) {
    throw validation_error("TooManyRows", "row count exceeds desk-scale guard");
  }
  for (int idx : labels_) {
    if (idx < 0 || idx >= space_.size()) {
      throw validation_error("UnknownLabel", "label index out of range");
    }
  }
  check_finite(features_, "features");
}

LabeledDataset::LabeledDataset(StateSpace space, const std::vector<std::string>& labels,
                               Matrix features)
    : LabeledDataset(space,
                     [&] {
                       std::vector<int> idx;
                       idx.reserve(labels.size());
                       for (const auto& l : labels) {
                         auto i = space.index_of(l);
                         if (!i) {
                           throw validation_error("UnknownLabel",
                                                  "label '" + l + "' not in state space");
                         }
                         idx.push_back(*i);
                       }
                       return idx;
                     }(),
                     std::move(features)) {}

std::string to_string(EstimatorId id) {
  switch (id) {
    case EstimatorId::plugin: return "plugin";
    case EstimatorId::ksg1: return "ksg1";
    case EstimatorId::ksg2: return "ksg2";
    case EstimatorId::mixed_ksg: return "mixed_ksg";
  }
  return "unknown";
}

EstimatorId estimator_from_string(const std::string& name) {
  if (name == "plugin") return EstimatorId::plugin;
  if (name == "ksg1") return EstimatorId::ksg1;
  if (name == "ksg2") return EstimatorId::ksg2;
  if (name == "mixed_ksg" || name == "mixed") return EstimatorId::mixed_ksg;
  throw validation_error("UnknownEstimator", "no estimator named '" + name + "'");
}

MIEstimate MIEstimate::make(double raw_bits, EstimatorId id, std::optional<int> k,
                            std::size_t n_samples) {
  MIEstimate e;
  e.raw_bits = raw_bits;
  e.bits = std::max(raw_bits, 0.0);
  e.clamped = raw_bits < 0.0;
  e.estimator_id = id;
  e.k = k;
  e.n_samples = n_samples;
  return e;
}

}  // namespace dtmi
