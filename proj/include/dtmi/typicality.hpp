#ifndef DTMI_TYPICALITY_HPP_
#define DTMI_TYPICALITY_HPP_

#include <vector>

#include "dtmi/core.hpp"
#include "dtmi/infotheory.hpp"
#include "dtmi/rng.hpp"
#include "dtmi/stats.hpp"

namespace dtmi {

// Per-dimension joint tables defining one jointly-matching set, with the
// entropies of every dimension cached at construction.
class ReferenceJoint {
 public:
  explicit ReferenceJoint(std::vector<JointTable> per_dimension);

  // Same table replicated across n iid dimensions.
  static ReferenceJoint iid(const JointTable& table, int n);

  int dims() const { return static_cast<int>(tables_.size()); }
  const JointTable& table(int i) const { return tables_[static_cast<std::size_t>(i)]; }
  double mean_hx_bits() const { return mean_hx_; }
  double mean_hy_bits() const { return mean_hy_; }
  double mean_hxy_bits() const { return mean_hxy_; }
  double sum_hxy_bits() const { return mean_hxy_ * dims(); }
  double sum_mi_bits() const { return sum_mi_; }
  const DiscreteDistribution& marginal_x(int i) const {
    return marg_x_[static_cast<std::size_t>(i)];
  }
  const DiscreteDistribution& marginal_y(int i) const {
    return marg_y_[static_cast<std::size_t>(i)];
  }

 private:
  std::vector<JointTable> tables_;
  std::vector<DiscreteDistribution> marg_x_, marg_y_;
  double mean_hx_ = 0.0, mean_hy_ = 0.0, mean_hxy_ = 0.0, sum_mi_ = 0.0;
};

// Strict three-condition membership test of Definition-style entropy
// typicality. Symbols with zero reference probability fail membership.
bool matching_membership(const std::vector<int>& x_seq, const std::vector<int>& y_seq,
                         const ReferenceJoint& ref, double epsilon);

enum class DrawMode { joint_draw, product_draw };

struct TypicalityProbability {
  double p_hat = 0.0;
  Interval ci_95;
  std::size_t trials = 0;
};

// Monte Carlo membership frequency with a Wilson interval. joint_draw
// samples each dimension from its joint table, product_draw from the
// product of its marginals.
TypicalityProbability typicality_probability(const ReferenceJoint& ref, int n,
                                             double epsilon, DrawMode mode,
                                             std::size_t trials, RngSeed seed);

// log2 of the cardinality bound: n epsilon + sum_i H(X_i, Y_i), bits.
double matching_set_log_size_bound(const ReferenceJoint& ref, int n, double epsilon);

enum class DecodeStatus { decoded, ambiguous, empty };

// Ambiguous and empty outcomes are legitimate results of the rule, counted
// as sensing errors by callers.
struct DecodeOutcome {
  DecodeStatus status = DecodeStatus::empty;
  int state = -1;

  bool ok() const { return status == DecodeStatus::decoded; }
};

// Declares state i iff exactly one candidate codeword forms a matching
// pair with y_seq under that candidate's own reference joint.
DecodeOutcome typicality_decode(const std::vector<int>& y_seq,
                                const std::vector<std::vector<int>>& codebook,
                                const std::vector<ReferenceJoint>& ref_models,
                                double epsilon);

}  // namespace dtmi

#endif  // DTMI_TYPICALITY_HPP_
