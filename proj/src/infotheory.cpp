#include "dtmi/infotheory.hpp"

#include <algorithm>
#include <cmath>

namespace dtmi {

namespace {
constexpr double kLog2E = 1.4426950408889634074;  // 1/ln(2)

// Entries may overshoot [0,1] by the normalization tolerance (rounding from
// upstream arithmetic); they are clamped after renormalization.
double checked_probability(double v) {
  if (!std::isfinite(v) || v < -kPriorTolerance || v > 1.0 + kPriorTolerance) {
    throw validation_error("InvalidDistribution", "entries must lie in [0,1]");
  }
  return std::clamp(v, 0.0, 1.0);
}
}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> probabilities)
    : p_(std::move(probabilities)) {
  if (p_.empty()) throw validation_error("InvalidDistribution", "empty support");
  double sum = 0.0;
  for (double& v : p_) {
    v = checked_probability(v);
    sum += v;
  }
  if (std::abs(sum - 1.0) > kPriorTolerance) {
    throw validation_error("InvalidDistribution",
                           "probabilities sum to " + std::to_string(sum));
  }
  for (double& v : p_) v = std::min(v / sum, 1.0);
}

JointTable::JointTable(Matrix probabilities) : p_(std::move(probabilities)) {
  if (p_.size() == 0) throw validation_error("InvalidDistribution", "empty table");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p_.rows(); ++i) {
    for (Eigen::Index j = 0; j < p_.cols(); ++j) {
      p_(i, j) = checked_probability(p_(i, j));
      sum += p_(i, j);
    }
  }
  if (std::abs(sum - 1.0) > kPriorTolerance) {
    throw validation_error("InvalidDistribution",
                           "table sums to " + std::to_string(sum));
  }
  p_ /= sum;
}

DiscreteDistribution JointTable::marginal_x() const {
  std::vector<double> m(static_cast<std::size_t>(p_.rows()));
  for (Eigen::Index i = 0; i < p_.rows(); ++i) m[static_cast<std::size_t>(i)] = p_.row(i).sum();
  return DiscreteDistribution(std::move(m));
}

DiscreteDistribution JointTable::marginal_y() const {
  std::vector<double> m(static_cast<std::size_t>(p_.cols()));
  for (Eigen::Index j = 0; j < p_.cols(); ++j) m[static_cast<std::size_t>(j)] = p_.col(j).sum();
  return DiscreteDistribution(std::move(m));
}

double entropy(const DiscreteDistribution& dist) {
  double h = 0.0;
  for (double p : dist.p()) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw validation_error("OutOfRange", "binary_entropy needs p in [0,1]");
  }
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

namespace {
double entropy_of_matrix(const Matrix& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      const double v = p(i, j);
      if (v > 0.0) h -= v * std::log2(v);
    }
  }
  return h;
}
}  // namespace

MIEstimate plugin_mi(const JointTable& joint) {
  const double hx = entropy(joint.marginal_x());
  const double hy = entropy(joint.marginal_y());
  const double hxy = entropy_of_matrix(joint.p());
  return MIEstimate::make(hx + hy - hxy, EstimatorId::plugin, std::nullopt,
                          static_cast<std::size_t>(joint.p().size()));
}

double conditional_entropy(const JointTable& joint) {
  const double hy = entropy(joint.marginal_y());
  const double hxy = entropy_of_matrix(joint.p());
  return std::max(hxy - hy, 0.0);
}

double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw validation_error("NonPositiveArgument", "digamma needs x > 0");
  }
  double result = 0.0;
  while (x < 6.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  // Asymptotic expansion: ln x - 1/(2x) - sum B_2n / (2n x^2n), n = 1..6.
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = 0.0;
  static const double coef[6] = {
      1.0 / 12.0,   -1.0 / 120.0,   1.0 / 252.0,
      -1.0 / 240.0, 1.0 / 132.0,    -691.0 / 32760.0,
  };
  double power = inv2;
  for (double c : coef) {
    series += c * power;
    power *= inv2;
  }
  result += std::log(x) - 0.5 * inv - series;
  return result;
}

double gaussian_mi_oracle(double rho) {
  if (!(std::abs(rho) < 1.0)) {
    throw validation_error("DegenerateCorrelation", "need |rho| < 1");
  }
  return -0.5 * std::log2(1.0 - rho * rho);
}

}  // namespace dtmi
