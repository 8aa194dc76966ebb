#ifndef DTMI_INFOTHEORY_HPP_
#define DTMI_INFOTHEORY_HPP_

#include <Eigen/Dense>
#include <vector>

#include "dtmi/core.hpp"

namespace dtmi {

// Finite probability vector; entries validated to [0,1] and sum 1 within
// kPriorTolerance, then re-normalized.
class DiscreteDistribution {
 public:
  explicit DiscreteDistribution(std::vector<double> probabilities);

  const std::vector<double>& p() const { return p_; }
  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }

 private:
  std::vector<double> p_;
};

// |X| x |Y| joint probability table; total sum 1 within kPriorTolerance.
class JointTable {
 public:
  explicit JointTable(Matrix probabilities);

  const Matrix& p() const { return p_; }
  Eigen::Index nx() const { return p_.rows(); }
  Eigen::Index ny() const { return p_.cols(); }

  DiscreteDistribution marginal_x() const;
  DiscreteDistribution marginal_y() const;

 private:
  Matrix p_;
};

// Shannon entropy in bits, with the 0 log 0 = 0 convention.
double entropy(const DiscreteDistribution& dist);

// H(p) = -p log2 p - (1-p) log2 (1-p) for p in [0,1].
double binary_entropy(double p);

// Exact plug-in mutual information H(X)+H(Y)-H(X,Y), in bits, clamped at 0.
MIEstimate plugin_mi(const JointTable& joint);

// H(X|Y) = H(X,Y) - H(Y) in bits.
double conditional_entropy(const JointTable& joint);

// psi(x) for x > 0: upward recurrence to x >= 6 then the asymptotic series
// with Bernoulli terms through x^-12.
double digamma(double x);

// Closed-form MI of a bivariate Gaussian with correlation rho, in bits.
double gaussian_mi_oracle(double rho);

}  // namespace dtmi

#endif  // DTMI_INFOTHEORY_HPP_
