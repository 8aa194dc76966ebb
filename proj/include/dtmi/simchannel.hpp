#ifndef DTMI_SIMCHANNEL_HPP_
#define DTMI_SIMCHANNEL_HPP_

#include <utility>
#include <vector>

#include "dtmi/bounds.hpp"
#include "dtmi/core.hpp"
#include "dtmi/rng.hpp"
#include "dtmi/stats.hpp"
#include "dtmi/typicality.hpp"

namespace dtmi {

// Per-state feature source: either a fixed m x n codeword matrix or
// per-state per-dimension symbol distributions.
class FeatureEncoder {
 public:
  static FeatureEncoder codebook(std::vector<std::vector<int>> codewords, int alphabet);
  static FeatureEncoder stochastic(std::vector<std::vector<DiscreteDistribution>> dists);

  int states() const { return m_; }
  int dims() const { return n_; }
  int alphabet() const { return alphabet_; }
  bool deterministic() const { return stochastic_.empty(); }

  int sample(int state, int dim, Rng& rng) const;
  const std::vector<int>& codeword(int state) const;
  // p(x | w) for one dimension.
  double feature_prob(int state, int dim, int symbol) const;
  double mean_feature(int state, int dim) const;

 private:
  FeatureEncoder() = default;
  int m_ = 0, n_ = 0, alphabet_ = 0;
  std::vector<std::vector<int>> codewords_;
  std::vector<std::vector<DiscreteDistribution>> stochastic_;
};

// Discrete memoryless channel: row-stochastic p(y|x) tables, either shared
// by all dimensions or given per dimension.
class DMCModel {
 public:
  explicit DMCModel(Matrix conditional);
  explicit DMCModel(std::vector<Matrix> per_dimension);
  static DMCModel bsc(double crossover);

  int input_alphabet() const { return static_cast<int>(tables_[0].rows()); }
  int output_alphabet() const { return static_cast<int>(tables_[0].cols()); }
  bool shared() const { return shared_; }
  int dims() const { return static_cast<int>(tables_.size()); }
  const Matrix& table(int dim) const {
    return shared_ ? tables_[0] : tables_[static_cast<std::size_t>(dim)];
  }

  int sample(int x, int dim, Rng& rng) const;

 private:
  bool shared_ = true;
  std::vector<Matrix> tables_;
};

// Additive white Gaussian channel on symbol values: y = x + N(0, sigma^2).
struct GaussianChannel {
  double sigma = 1.0;

  explicit GaussianChannel(double sigma_in);
};

struct DecoderSpec {
  enum class Kind { ml, typicality, nearest_centroid };
  Kind kind = Kind::ml;
  double epsilon = kDefaultEpsilon;  // typicality only

  static DecoderSpec ml() { return {Kind::ml, kDefaultEpsilon}; }
  static DecoderSpec typicality(double eps) { return {Kind::typicality, eps}; }
  static DecoderSpec nearest_centroid() { return {Kind::nearest_centroid, kDefaultEpsilon}; }
};

struct MonteCarloResult {
  double p_e = 0.0;
  std::vector<double> xi;             // per-state conditional error rates
  std::vector<std::size_t> trials_per_state;
  Interval ci_95;
  std::size_t trials = 0;
  RngSeed seed;
};

struct ExactError {
  double p_e = 0.0;
  std::vector<double> xi;
};

struct ChannelMIReport {
  std::vector<double> per_dim_xy_bits;  // I(X_i; Y_i) under the prior mixture
  double total_xy_bits = 0.0;
  std::vector<double> per_dim_wy_bits;  // I(W; Y_i)
  double total_wy_bits = 0.0;
};

struct ChainMIReport {
  double i_w_what_bits = 0.0;
  double i_w_y_bits = 0.0;
  double i_x_y_bits = 0.0;
};

enum class CrossMIStrategy { reference_joint };

// One W -> X^n -> Y^n episode.
std::pair<std::vector<int>, std::vector<int>> sample_episode(int state,
                                                             const FeatureEncoder& encoder,
                                                             const DMCModel& channel,
                                                             Rng& rng);
std::pair<std::vector<int>, std::vector<double>> sample_episode(int state,
                                                                const FeatureEncoder& encoder,
                                                                const GaussianChannel& channel,
                                                                Rng& rng);

// Maximum a-posteriori decoding, ties to the smallest state index.
int ml_decode(const std::vector<int>& y_seq, const FeatureEncoder& encoder,
              const DMCModel& channel, const StateSpace& prior);
int ml_decode(const std::vector<double>& y_seq, const FeatureEncoder& encoder,
              const GaussianChannel& channel, const StateSpace& prior);

int nearest_centroid_decode(const std::vector<double>& y_seq, const FeatureEncoder& encoder);

// State-conditional reference joints, one per state: dimension i of state w
// has joint p(x|w) p(y|x). These drive the typicality decoder.
std::vector<ReferenceJoint> state_reference_joints(const FeatureEncoder& encoder,
                                                   const DMCModel& channel);

// Prior-mixture reference joint: dimension i has p(x,y) = sum_w p(w) p(x|w) p(y|x).
ReferenceJoint mixture_reference_joint(const FeatureEncoder& encoder,
                                       const DMCModel& channel, const StateSpace& prior);

// Stratified Monte Carlo estimate of the expected sensing error. Trials are
// allocated per state by largest-remainder rounding of the prior so that
// p_e = sum_i p(w_i) xi_i holds as an identity.
MonteCarloResult run_monte_carlo(const StateSpace& space, const FeatureEncoder& encoder,
                                 const DMCModel& channel, const DecoderSpec& decoder,
                                 std::size_t trials, RngSeed seed);
MonteCarloResult run_monte_carlo(const StateSpace& space, const FeatureEncoder& encoder,
                                 const GaussianChannel& channel, const DecoderSpec& decoder,
                                 std::size_t trials, RngSeed seed);

// Exact enumeration of every output sequence; guarded at |Y|^n <= 2^20.
ExactError exact_error_small(const StateSpace& space, const FeatureEncoder& encoder,
                             const DMCModel& channel, const DecoderSpec& decoder);

// Exact per-dimension plug-in MI from the induced joints.
ChannelMIReport exact_channel_mi(const FeatureEncoder& encoder, const DMCModel& channel,
                                 const StateSpace& prior);

// Cross-MI exponent matrix for the typicality upper bound, computed under
// the prior-mixture reference joint (the Lemma-4 reference distribution).
CrossMIMatrix cross_mi_exact(const FeatureEncoder& encoder, const DMCModel& channel,
                             const StateSpace& prior,
                             CrossMIStrategy strategy = CrossMIStrategy::reference_joint);

FeatureEncoder build_repetition_encoder(const std::vector<std::vector<int>>& base_codewords,
                                        int repeat_factor, int alphabet);

// Plug-in MI on empirical joints gathered over Monte Carlo episodes.
ChainMIReport estimate_chain_mi(const StateSpace& space, const FeatureEncoder& encoder,
                                const DMCModel& channel, const DecoderSpec& decoder,
                                std::size_t trials, RngSeed seed);

}  // namespace dtmi

#endif  // DTMI_SIMCHANNEL_HPP_
