#include "dtmi/simchannel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "dtmi/infotheory.hpp"
#include "dtmi/parallel.hpp"

namespace dtmi {

FeatureEncoder FeatureEncoder::codebook(std::vector<std::vector<int>> codewords,
                                        int alphabet) {
  if (codewords.size() < 2) {
    throw validation_error("InvalidArguments", "codebook needs >= 2 states");
  }
  const std::size_t n = codewords[0].size();
  if (n == 0) throw validation_error("InvalidArguments", "codewords need n >= 1");
  for (const auto& cw : codewords) {
    if (cw.size() != n) {
      throw validation_error("DimensionMismatch", "codeword lengths differ");
    }
    for (int s : cw) {
      if (s < 0 || s >= alphabet) {
        throw validation_error("AlphabetMismatch", "codeword symbol outside alphabet");
      }
    }
  }
  FeatureEncoder e;
  e.m_ = static_cast<int>(codewords.size());
  e.n_ = static_cast<int>(n);
  e.alphabet_ = alphabet;
  e.codewords_ = std::move(codewords);
  return e;
}

FeatureEncoder FeatureEncoder::stochastic(
    std::vector<std::vector<DiscreteDistribution>> dists) {
  if (dists.size() < 2) {
    throw validation_error("InvalidArguments", "encoder needs >= 2 states");
  }
  const std::size_t n = dists[0].size();
  if (n == 0) throw validation_error("InvalidArguments", "encoder needs n >= 1");
  std::size_t alphabet = dists[0][0].size();
  for (const auto& per_state : dists) {
    if (per_state.size() != n) {
      throw validation_error("DimensionMismatch", "per-state dimension counts differ");
    }
    for (const auto& d : per_state) {
      if (d.size() != alphabet) {
        throw validation_error("AlphabetMismatch", "alphabet sizes differ across dims");
      }
    }
  }
  FeatureEncoder e;
  e.m_ = static_cast<int>(dists.size());
  e.n_ = static_cast<int>(n);
  e.alphabet_ = static_cast<int>(alphabet);
  e.stochastic_ = std::move(dists);
  return e;
}

int FeatureEncoder::sample(int state, int dim, Rng& rng) const {
  if (deterministic()) {
    return codewords_[static_cast<std::size_t>(state)][static_cast<std::size_t>(dim)];
  }
  return rng.categorical(
      stochastic_[static_cast<std::size_t>(state)][static_cast<std::size_t>(dim)].p());
}

const std::vector<int>& FeatureEncoder::codeword(int state) const {
  if (!deterministic()) {
    throw validation_error("InvalidArguments",
                           "stochastic encoders have no fixed codewords");
  }
  return codewords_[static_cast<std::size_t>(state)];
}

double FeatureEncoder::feature_prob(int state, int dim, int symbol) const {
  if (deterministic()) {
    return codewords_[static_cast<std::size_t>(state)][static_cast<std::size_t>(dim)] == symbol
               ? 1.0
               : 0.0;
  }
  return stochastic_[static_cast<std::size_t>(state)][static_cast<std::size_t>(dim)]
      [static_cast<std::size_t>(symbol)];
}

double FeatureEncoder::mean_feature(int state, int dim) const {
  if (deterministic()) {
    return static_cast<double>(
        codewords_[static_cast<std::size_t>(state)][static_cast<std::size_t>(dim)]);
  }
  const auto& d = stochastic_[static_cast<std::size_t>(state)][static_cast<std::size_t>(dim)];
  double mean = 0.0;
  for (std::size_t s = 0; s < d.size(); ++s) mean += static_cast<double>(s) * d[s];
  return mean;
}

namespace {
void check_row_stochastic(const Matrix& t) {
  if (t.rows() < 1 || t.cols() < 1) {
    throw validation_error("InvalidArguments", "empty conditional table");
  }
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    double sum = 0.0;
    for (Eigen::Index c = 0; c < t.cols(); ++c) {
      const double v = t(r, c);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw validation_error("InvalidArguments", "conditional entries must be in [0,1]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kPriorTolerance) {
      throw validation_error("InvalidArguments",
                             "conditional row sums to " + std::to_string(sum));
    }
  }
}
}  // namespace

DMCModel::DMCModel(Matrix conditional) : shared_(true) {
  check_row_stochastic(conditional);
  tables_.push_back(std::move(conditional));
}

DMCModel::DMCModel(std::vector<Matrix> per_dimension) : shared_(false) {
  if (per_dimension.empty()) {
    throw validation_error("InvalidArguments", "need >= 1 per-dimension table");
  }
  for (const auto& t : per_dimension) {
    check_row_stochastic(t);
    if (t.rows() != per_dimension[0].rows() || t.cols() != per_dimension[0].cols()) {
      throw validation_error("AlphabetMismatch", "per-dimension alphabets differ");
    }
  }
  tables_ = std::move(per_dimension);
}

DMCModel DMCModel::bsc(double crossover) {
  if (!(crossover >= 0.0 && crossover <= 1.0)) {
    throw validation_error("InvalidArguments", "crossover must be in [0,1]");
  }
  Matrix t(2, 2);
  t << 1.0 - crossover, crossover, crossover, 1.0 - crossover;
  return DMCModel(t);
}

int DMCModel::sample(int x, int dim, Rng& rng) const {
  const Matrix& t = table(dim);
  double u = rng.uniform();
  for (Eigen::Index y = 0; y + 1 < t.cols(); ++y) {
    u -= t(x, y);
    if (u < 0.0) return static_cast<int>(y);
  }
  return static_cast<int>(t.cols()) - 1;
}

GaussianChannel::GaussianChannel(double sigma_in) : sigma(sigma_in) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw validation_error("InvalidArguments", "sigma must be finite and > 0");
  }
}

namespace {
void check_alphabets(const FeatureEncoder& encoder, const DMCModel& channel) {
  if (encoder.alphabet() > channel.input_alphabet()) {
    throw validation_error("AlphabetMismatch",
                           "encoder alphabet exceeds channel input alphabet");
  }
  if (!channel.shared() && channel.dims() != encoder.dims()) {
    throw validation_error("DimensionMismatch",
                           "per-dimension channel does not match feature count");
  }
}
}  // namespace

std::pair<std::vector<int>, std::vector<int>> sample_episode(int state,
                                                             const FeatureEncoder& encoder,
                                                             const DMCModel& channel,
                                                             Rng& rng) {
  check_alphabets(encoder, channel);
  const int n = encoder.dims();
  std::vector<int> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int xi = encoder.sample(state, i, rng);
    x[static_cast<std::size_t>(i)] = xi;
    y[static_cast<std::size_t>(i)] = channel.sample(xi, i, rng);
  }
  return {std::move(x), std::move(y)};
}

std::pair<std::vector<int>, std::vector<double>> sample_episode(int state,
                                                                const FeatureEncoder& encoder,
                                                                const GaussianChannel& channel,
                                                                Rng& rng) {
  const int n = encoder.dims();
  std::vector<int> x(static_cast<std::size_t>(n));
  std::vector<double> y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int xi = encoder.sample(state, i, rng);
    x[static_cast<std::size_t>(i)] = xi;
    y[static_cast<std::size_t>(i)] = static_cast<double>(xi) + channel.sigma * rng.normal();
  }
  return {std::move(x), std::move(y)};
}

int ml_decode(const std::vector<int>& y_seq, const FeatureEncoder& encoder,
              const DMCModel& channel, const StateSpace& prior) {
  check_alphabets(encoder, channel);
  const int m = encoder.states();
  const int n = encoder.dims();
  if (static_cast<int>(y_seq.size()) != n) {
    throw validation_error("DimensionMismatch", "embedding length differs from n");
  }
  // For deterministic codewords over a shared table, accumulate integer
  // cell counts first: states whose count multisets agree then produce
  // bit-identical log-likelihoods and the smallest-index tie rule is exact.
  const bool counting = encoder.deterministic() && channel.shared();
  double best = -std::numeric_limits<double>::infinity();
  int best_state = 0;
  for (int w = 0; w < m; ++w) {
    double ll = std::log2(std::max(prior.prior(w), 0.0));
    if (counting) {
      const Matrix& t = channel.table(0);
      Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(t.rows(), t.cols());
      const auto& cw = encoder.codeword(w);
      for (int i = 0; i < n; ++i) {
        counts(cw[static_cast<std::size_t>(i)], y_seq[static_cast<std::size_t>(i)]) += 1;
      }
      // Summing the per-cell terms in sorted order makes states with equal
      // count multisets produce bit-identical log-likelihoods, so the
      // smallest-index tie rule is exact.
      std::vector<double> terms;
      terms.reserve(static_cast<std::size_t>(t.size()));
      bool impossible = false;
      for (Eigen::Index a = 0; a < t.rows() && !impossible; ++a) {
        for (Eigen::Index b = 0; b < t.cols(); ++b) {
          const int c = counts(a, b);
          if (c == 0) continue;
          const double p = t(a, b);
          if (p == 0.0) {
            impossible = true;
            break;
          }
          terms.push_back(c * std::log2(p));
        }
      }
      if (impossible) {
        ll = -std::numeric_limits<double>::infinity();
      } else {
        std::sort(terms.begin(), terms.end());
        for (double v : terms) ll += v;
      }
    } else {
      for (int i = 0; i < n; ++i) {
        double p = 0.0;
        const Matrix& t = channel.table(i);
        for (int x = 0; x < encoder.alphabet(); ++x) {
          const double px = encoder.feature_prob(w, i, x);
          if (px > 0.0) p += px * t(x, y_seq[static_cast<std::size_t>(i)]);
        }
        if (p == 0.0) {
          ll = -std::numeric_limits<double>::infinity();
          break;
        }
        ll += std::log2(p);
      }
    }
    if (ll > best) {
      best = ll;
      best_state = w;
    }
  }
  return best_state;
}

int ml_decode(const std::vector<double>& y_seq, const FeatureEncoder& encoder,
              const GaussianChannel& channel, const StateSpace& prior) {
  const int m = encoder.states();
  const int n = encoder.dims();
  if (static_cast<int>(y_seq.size()) != n) {
    throw validation_error("DimensionMismatch", "embedding length differs from n");
  }
  double best = -std::numeric_limits<double>::infinity();
  int best_state = 0;
  const double inv_two_var = 1.0 / (2.0 * channel.sigma * channel.sigma);
  for (int w = 0; w < m; ++w) {
    // Deterministic codewords: exact Gaussian log-likelihood. Stochastic
    // encoders fall back to the per-dimension mixture likelihood.
    double ll = std::log(std::max(prior.prior(w), 0.0));
    if (encoder.deterministic()) {
      for (int i = 0; i < n; ++i) {
        const double d = y_seq[static_cast<std::size_t>(i)] - encoder.mean_feature(w, i);
        ll -= d * d * inv_two_var;
      }
    } else {
      for (int i = 0; i < n; ++i) {
        double p = 0.0;
        for (int x = 0; x < encoder.alphabet(); ++x) {
          const double px = encoder.feature_prob(w, i, x);
          if (px == 0.0) continue;
          const double d = y_seq[static_cast<std::size_t>(i)] - static_cast<double>(x);
          p += px * std::exp(-d * d * inv_two_var);
        }
        if (p == 0.0) {
          ll = -std::numeric_limits<double>::infinity();
          break;
        }
        ll += std::log(p);
      }
    }
    if (ll > best) {
      best = ll;
      best_state = w;
    }
  }
  return best_state;
}

int nearest_centroid_decode(const std::vector<double>& y_seq, const FeatureEncoder& encoder) {
  const int n = encoder.dims();
  if (static_cast<int>(y_seq.size()) != n) {
    throw validation_error("DimensionMismatch", "embedding length differs from n");
  }
  double best = std::numeric_limits<double>::infinity();
  int best_state = 0;
  for (int w = 0; w < encoder.states(); ++w) {
    double d2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = y_seq[static_cast<std::size_t>(i)] - encoder.mean_feature(w, i);
      d2 += d * d;
    }
    if (d2 < best) {
      best = d2;
      best_state = w;
    }
  }
  return best_state;
}

std::vector<ReferenceJoint> state_reference_joints(const FeatureEncoder& encoder,
                                                   const DMCModel& channel) {
  check_alphabets(encoder, channel);
  std::vector<ReferenceJoint> refs;
  refs.reserve(static_cast<std::size_t>(encoder.states()));
  for (int w = 0; w < encoder.states(); ++w) {
    std::vector<JointTable> per_dim;
    per_dim.reserve(static_cast<std::size_t>(encoder.dims()));
    for (int i = 0; i < encoder.dims(); ++i) {
      const Matrix& t = channel.table(i);
      Matrix j = Matrix::Zero(t.rows(), t.cols());
      for (int x = 0; x < encoder.alphabet(); ++x) {
        const double px = encoder.feature_prob(w, i, x);
        if (px > 0.0) j.row(x) = px * t.row(x);
      }
      per_dim.emplace_back(std::move(j));
    }
    refs.emplace_back(std::move(per_dim));
  }
  return refs;
}

ReferenceJoint mixture_reference_joint(const FeatureEncoder& encoder,
                                       const DMCModel& channel, const StateSpace& prior) {
  check_alphabets(encoder, channel);
  if (prior.size() != encoder.states()) {
    throw validation_error("DimensionMismatch", "prior size differs from state count");
  }
  std::vector<JointTable> per_dim;
  per_dim.reserve(static_cast<std::size_t>(encoder.dims()));
  for (int i = 0; i < encoder.dims(); ++i) {
    const Matrix& t = channel.table(i);
    Matrix j = Matrix::Zero(t.rows(), t.cols());
    for (int w = 0; w < encoder.states(); ++w) {
      for (int x = 0; x < encoder.alphabet(); ++x) {
        const double px = prior.prior(w) * encoder.feature_prob(w, i, x);
        if (px > 0.0) j.row(x) += px * t.row(x);
      }
    }
    per_dim.emplace_back(std::move(j));
  }
  return ReferenceJoint(std::move(per_dim));
}

namespace {

// Largest-remainder allocation of `trials` across the prior, >= 1 each.
std::vector<std::size_t> stratify_trials(const StateSpace& space, std::size_t trials) {
  const int m = space.size();
  if (trials < static_cast<std::size_t>(m)) {
    throw validation_error("InvalidArguments", "need at least one trial per state");
  }
  std::vector<std::size_t> alloc(static_cast<std::size_t>(m));
  std::vector<std::pair<double, int>> rema;
  std::size_t used = 0;
  for (int i = 0; i < m; ++i) {
    const double exact = space.prior(i) * static_cast<double>(trials);
    alloc[static_cast<std::size_t>(i)] = static_cast<std::size_t>(std::floor(exact));
    used += alloc[static_cast<std::size_t>(i)];
    rema.push_back({exact - std::floor(exact), i});
  }
  std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::size_t r = 0; used < trials; ++r, ++used) {
    alloc[static_cast<std::size_t>(rema[r % rema.size()].second)] += 1;
  }
  for (int i = 0; i < m; ++i) {
    while (alloc[static_cast<std::size_t>(i)] == 0) {
      auto it = std::max_element(alloc.begin(), alloc.end());
      *it -= 1;
      alloc[static_cast<std::size_t>(i)] += 1;
    }
  }
  return alloc;
}

struct TypicalityContext {
  std::vector<std::vector<int>> codebook;
  std::vector<ReferenceJoint> refs;
};

// Shared Monte Carlo driver. decode(state, trial_rng) -> error flag; the
// per-trial substream makes the result independent of thread count.
template <typename TrialFn>
MonteCarloResult monte_carlo_driver(const StateSpace& space, std::size_t trials,
                                    RngSeed seed, TrialFn&& trial_is_error) {
  const int m = space.size();
  const std::vector<std::size_t> alloc = stratify_trials(space, trials);
  std::vector<std::size_t> offset(static_cast<std::size_t>(m) + 1, 0);
  for (int i = 0; i < m; ++i) {
    offset[static_cast<std::size_t>(i) + 1] = offset[static_cast<std::size_t>(i)] +
                                              alloc[static_cast<std::size_t>(i)];
  }

  std::vector<std::size_t> errors(static_cast<std::size_t>(m), 0);
  const unsigned workers = static_cast<unsigned>(max_worker_threads());

  auto run_range = [&](std::size_t begin, std::size_t end,
                       std::vector<std::size_t>& err_out) {
    for (std::size_t g = begin; g < end; ++g) {
      const int state = static_cast<int>(
          std::upper_bound(offset.begin(), offset.end(), g) - offset.begin() - 1);
      Rng rng(derive_substream(seed, g));
      if (trial_is_error(state, rng)) err_out[static_cast<std::size_t>(state)] += 1;
    }
  };

  if (workers == 1 || trials < 2048) {
    run_range(0, trials, errors);
  } else {
    std::vector<std::vector<std::size_t>> partial(
        workers, std::vector<std::size_t>(static_cast<std::size_t>(m), 0));
    std::vector<std::thread> pool;
    const std::size_t chunk = (trials + workers - 1) / workers;
    for (unsigned wkr = 0; wkr < workers; ++wkr) {
      const std::size_t b = wkr * chunk;
      const std::size_t e = std::min(trials, b + chunk);
      if (b >= e) break;
      pool.emplace_back([&, b, e, wkr] { run_range(b, e, partial[wkr]); });
    }
    for (auto& t : pool) t.join();
    for (const auto& p : partial) {
      for (int i = 0; i < m; ++i) errors[static_cast<std::size_t>(i)] += p[static_cast<std::size_t>(i)];
    }
  }

  MonteCarloResult result;
  result.trials = trials;
  result.trials_per_state = alloc;
  result.seed = seed;
  result.xi.resize(static_cast<std::size_t>(m));
  double pe = 0.0;
  for (int i = 0; i < m; ++i) {
    result.xi[static_cast<std::size_t>(i)] =
        static_cast<double>(errors[static_cast<std::size_t>(i)]) /
        static_cast<double>(alloc[static_cast<std::size_t>(i)]);
    pe += space.prior(i) * result.xi[static_cast<std::size_t>(i)];
  }
  result.p_e = pe;
  result.ci_95 = wilson_interval(pe, trials);
  return result;
}

}  // namespace

MonteCarloResult run_monte_carlo(const StateSpace& space, const FeatureEncoder& encoder,
                                 const DMCModel& channel, const DecoderSpec& decoder,
                                 std::size_t trials, RngSeed seed) {
  check_alphabets(encoder, channel);
  if (space.size() != encoder.states()) {
    throw validation_error("DimensionMismatch", "state space size differs from encoder");
  }

  TypicalityContext ctx;
  if (decoder.kind == DecoderSpec::Kind::typicality) {
    if (!encoder.deterministic()) {
      throw validation_error("InvalidArguments",
                             "typicality decoding needs a deterministic codebook");
    }
    for (int w = 0; w < encoder.states(); ++w) ctx.codebook.push_back(encoder.codeword(w));
    ctx.refs = state_reference_joints(encoder, channel);
  }

  return monte_carlo_driver(space, trials, seed, [&](int state, Rng& rng) -> bool {
    auto [x, y] = sample_episode(state, encoder, channel, rng);
    switch (decoder.kind) {
      case DecoderSpec::Kind::ml:
        return ml_decode(y, encoder, channel, space) != state;
      case DecoderSpec::Kind::typicality: {
        const DecodeOutcome out =
            typicality_decode(y, ctx.codebook, ctx.refs, decoder.epsilon);
        return !(out.ok() && out.state == state);
      }
      case DecoderSpec::Kind::nearest_centroid: {
        std::vector<double> yd(y.begin(), y.end());
        return nearest_centroid_decode(yd, encoder) != state;
      }
    }
    return true;
  });
}

MonteCarloResult run_monte_carlo(const StateSpace& space, const FeatureEncoder& encoder,
                                 const GaussianChannel& channel, const DecoderSpec& decoder,
                                 std::size_t trials, RngSeed seed) {
  if (space.size() != encoder.states()) {
    throw validation_error("DimensionMismatch", "state space size differs from encoder");
  }
  if (decoder.kind == DecoderSpec::Kind::typicality) {
    throw validation_error("InvalidArguments",
                           "typicality decoding needs evaluable discrete probabilities");
  }
  return monte_carlo_driver(space, trials, seed, [&](int state, Rng& rng) -> bool {
    auto [x, y] = sample_episode(state, encoder, channel, rng);
    if (decoder.kind == DecoderSpec::Kind::ml) {
      return ml_decode(y, encoder, channel, space) != state;
    }
    return nearest_centroid_decode(y, encoder) != state;
  });
}

ExactError exact_error_small(const StateSpace& space, const FeatureEncoder& encoder,
                             const DMCModel& channel, const DecoderSpec& decoder) {
  check_alphabets(encoder, channel);
  const int n = encoder.dims();
  const int m = encoder.states();
  const int ab = channel.output_alphabet();
  const double total_log2 = n * std::log2(static_cast<double>(ab));
  if (total_log2 > 20.0) {
    throw validation_error("InstanceTooLarge", "|Y|^n exceeds 2^20 sequences");
  }

  TypicalityContext ctx;
  if (decoder.kind == DecoderSpec::Kind::typicality) {
    if (!encoder.deterministic()) {
      throw validation_error("InvalidArguments",
                             "typicality decoding needs a deterministic codebook");
    }
    for (int w = 0; w < m; ++w) ctx.codebook.push_back(encoder.codeword(w));
    ctx.refs = state_reference_joints(encoder, channel);
  }

  auto decode = [&](const std::vector<int>& y) -> int {
    switch (decoder.kind) {
      case DecoderSpec::Kind::ml:
        return ml_decode(y, encoder, channel, space);
      case DecoderSpec::Kind::typicality: {
        const DecodeOutcome out =
            typicality_decode(y, ctx.codebook, ctx.refs, decoder.epsilon);
        return out.ok() ? out.state : -1;
      }
      case DecoderSpec::Kind::nearest_centroid: {
        std::vector<double> yd(y.begin(), y.end());
        return nearest_centroid_decode(yd, encoder);
      }
    }
    return -1;
  };

  std::vector<double> err(static_cast<std::size_t>(m), 0.0);
  std::vector<int> y(static_cast<std::size_t>(n), 0);
  const std::size_t count = static_cast<std::size_t>(std::llround(std::pow(ab, n)));
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rem = idx;
    for (int i = 0; i < n; ++i) {
      y[static_cast<std::size_t>(i)] = static_cast<int>(rem % static_cast<std::size_t>(ab));
      rem /= static_cast<std::size_t>(ab);
    }
    const int decoded = decode(y);
    for (int w = 0; w < m; ++w) {
      if (decoded == w) continue;
      double py = 1.0;
      for (int i = 0; i < n && py > 0.0; ++i) {
        double p = 0.0;
        for (int x = 0; x < encoder.alphabet(); ++x) {
          const double px = encoder.feature_prob(w, i, x);
          if (px > 0.0) p += px * channel.table(i)(x, y[static_cast<std::size_t>(i)]);
        }
        py *= p;
      }
      err[static_cast<std::size_t>(w)] += py;
    }
  }

  ExactError out;
  out.xi = err;
  for (int w = 0; w < m; ++w) out.p_e += space.prior(w) * err[static_cast<std::size_t>(w)];
  return out;
}

ChannelMIReport exact_channel_mi(const FeatureEncoder& encoder, const DMCModel& channel,
                                 const StateSpace& prior) {
  check_alphabets(encoder, channel);
  if (prior.size() != encoder.states()) {
    throw validation_error("DimensionMismatch", "prior size differs from state count");
  }
  ChannelMIReport report;
  const ReferenceJoint mixture = mixture_reference_joint(encoder, channel, prior);
  for (int i = 0; i < encoder.dims(); ++i) {
    const double mi = plugin_mi(mixture.table(i)).bits;
    report.per_dim_xy_bits.push_back(mi);
    report.total_xy_bits += mi;

    Matrix wy = Matrix::Zero(prior.size(), channel.output_alphabet());
    for (int w = 0; w < encoder.states(); ++w) {
      for (int x = 0; x < encoder.alphabet(); ++x) {
        const double px = prior.prior(w) * encoder.feature_prob(w, i, x);
        if (px > 0.0) wy.row(w) += px * channel.table(i).row(x);
      }
    }
    const double mi_wy = plugin_mi(JointTable(wy)).bits;
    report.per_dim_wy_bits.push_back(mi_wy);
    report.total_wy_bits += mi_wy;
  }
  return report;
}

CrossMIMatrix cross_mi_exact(const FeatureEncoder& encoder, const DMCModel& channel,
                             const StateSpace& prior, CrossMIStrategy strategy) {
  (void)strategy;  // reference_joint is the only supplier implemented
  const ChannelMIReport mi = exact_channel_mi(encoder, channel, prior);
  const int m = encoder.states();
  Matrix terms = Matrix::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      if (j != k) terms(j, k) = mi.total_xy_bits;
    }
  }
  return CrossMIMatrix(std::move(terms));
}

FeatureEncoder build_repetition_encoder(const std::vector<std::vector<int>>& base_codewords,
                                        int repeat_factor, int alphabet) {
  if (repeat_factor < 1) {
    throw validation_error("InvalidArguments", "repeat factor must be >= 1");
  }
  std::vector<std::vector<int>> repeated;
  repeated.reserve(base_codewords.size());
  for (const auto& base : base_codewords) {
    std::vector<int> cw;
    cw.reserve(base.size() * static_cast<std::size_t>(repeat_factor));
    for (int r = 0; r < repeat_factor; ++r) cw.insert(cw.end(), base.begin(), base.end());
    repeated.push_back(std::move(cw));
  }
  return FeatureEncoder::codebook(std::move(repeated), alphabet);
}

namespace {
// Plug-in MI in bits over integer-pair counts.
double empirical_mi_bits(const std::unordered_map<std::uint64_t, std::size_t>& counts,
                         std::size_t total, std::uint64_t col_mod) {
  std::unordered_map<std::uint64_t, std::size_t> row_counts, col_counts;
  for (const auto& [key, c] : counts) {
    row_counts[key / col_mod] += c;
    col_counts[key % col_mod] += c;
  }
  const double tot = static_cast<double>(total);
  double h_row = 0.0, h_col = 0.0, h_joint = 0.0;
  for (const auto& [k, c] : row_counts) h_row -= (c / tot) * std::log2(c / tot);
  for (const auto& [k, c] : col_counts) h_col -= (c / tot) * std::log2(c / tot);
  for (const auto& [k, c] : counts) h_joint -= (c / tot) * std::log2(c / tot);
  return std::max(h_row + h_col - h_joint, 0.0);
}
}  // namespace

ChainMIReport estimate_chain_mi(const StateSpace& space, const FeatureEncoder& encoder,
                                const DMCModel& channel, const DecoderSpec& decoder,
                                std::size_t trials, RngSeed seed) {
  check_alphabets(encoder, channel);
  const int n = encoder.dims();
  const double seq_bits = n * std::log2(static_cast<double>(
                                  std::max(channel.output_alphabet(), encoder.alphabet())));
  if (seq_bits > 30.0) {
    throw validation_error("InstanceTooLarge", "sequence alphabet too large to index");
  }
  if (trials < 1) throw validation_error("InvalidArguments", "need >= 1 trial");

  TypicalityContext ctx;
  if (decoder.kind == DecoderSpec::Kind::typicality) {
    for (int w = 0; w < encoder.states(); ++w) ctx.codebook.push_back(encoder.codeword(w));
    ctx.refs = state_reference_joints(encoder, channel);
  }

  const std::uint64_t ybase = static_cast<std::uint64_t>(channel.output_alphabet());
  const std::uint64_t xbase = static_cast<std::uint64_t>(encoder.alphabet());
  auto pack = [](const std::vector<int>& seq, std::uint64_t base) {
    std::uint64_t key = 0;
    for (int s : seq) key = key * base + static_cast<std::uint64_t>(s);
    return key;
  };
  std::uint64_t ymod = 1;
  for (int i = 0; i < n; ++i) ymod *= ybase;

  std::unordered_map<std::uint64_t, std::size_t> w_what, w_y, x_y;
  const std::uint64_t m64 = static_cast<std::uint64_t>(space.size());
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_substream(seed, t));
    const int w = rng.categorical(space.prior());
    auto [x, y] = sample_episode(w, encoder, channel, rng);
    int what;
    switch (decoder.kind) {
      case DecoderSpec::Kind::ml: what = ml_decode(y, encoder, channel, space); break;
      case DecoderSpec::Kind::typicality: {
        const DecodeOutcome out =
            typicality_decode(y, ctx.codebook, ctx.refs, decoder.epsilon);
        what = out.ok() ? out.state : space.size();  // failure bucket
        break;
      }
      default: {
        std::vector<double> yd(y.begin(), y.end());
        what = nearest_centroid_decode(yd, encoder);
        break;
      }
    }
    const std::uint64_t ykey = pack(y, ybase);
    const std::uint64_t xkey = pack(x, xbase);
    w_what[static_cast<std::uint64_t>(w) * (m64 + 1) + static_cast<std::uint64_t>(what)] += 1;
    w_y[static_cast<std::uint64_t>(w) * ymod + ykey] += 1;
    x_y[xkey * ymod + ykey] += 1;
  }

  ChainMIReport report;
  report.i_w_what_bits = empirical_mi_bits(w_what, trials, m64 + 1);
  report.i_w_y_bits = empirical_mi_bits(w_y, trials, ymod);
  report.i_x_y_bits = empirical_mi_bits(x_y, trials, ymod);
  return report;
}

}  // namespace dtmi
