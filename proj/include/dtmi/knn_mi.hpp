#ifndef DTMI_KNN_MI_HPP_
#define DTMI_KNN_MI_HPP_

#include "dtmi/core.hpp"
#include "dtmi/rng.hpp"

namespace dtmi {

enum class Aggregation { joint, per_dimension_sum };

struct EstimatorConfig {
  EstimatorId estimator_id = EstimatorId::mixed_ksg;
  int k = 3;
  Aggregation aggregation = Aggregation::joint;
};

// Kraskov-Stogbauer-Grassberger estimator, variant 1: marginal neighbor
// counts strictly inside the k-th joint max-norm distance.
MIEstimate ksg1(const PairedSamples& samples, int k, RngSeed seed = RngSeed{});

// KSG variant 2: marginal counts within (<=) the per-marginal projected
// radii of the k nearest joint neighbors.
MIEstimate ksg2(const PairedSamples& samples, int k, RngSeed seed = RngSeed{});

// Mixed discrete-continuous fixed-k estimator: where the k-th joint
// distance is zero, k is replaced by the zero-distance count; elsewhere it
// follows the KSG1 rule. Never jitters.
MIEstimate mixed_ksg(const PairedSamples& samples, int k);

// DTMI front-end: aggregation joint estimates I(X^n;Y^n) in the full joint
// space; per_dimension_sum returns the sum of per-dimension estimates.
MIEstimate estimate_dtmi(const PairedSamples& samples, const EstimatorConfig& config,
                         RngSeed seed = RngSeed{});

// Number of rows of `points` within max-norm `radius` of row `center_index`
// (the center row itself is not counted).
int count_within_maxnorm(const Matrix& points, Eigen::Index center_index,
                         double radius, bool strict);

// Per-point marginal neighbor counts and k-th joint distances under the
// KSG1 counting rule, computed through the isolated counting primitive.
// Slower than the fused estimator scan; intended for inspection and as a
// second route in tests.
struct NeighborCounts {
  std::vector<int> n_x;
  std::vector<int> n_y;
  std::vector<double> kth_distance;
};

NeighborCounts neighbor_counts_ksg1(const PairedSamples& samples, int k);

}  // namespace dtmi

#endif  // DTMI_KNN_MI_HPP_
