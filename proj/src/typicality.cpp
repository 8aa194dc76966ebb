#include "dtmi/typicality.hpp"

#include <cmath>
#include <limits>

namespace dtmi {

namespace {
double entropy_of_table_bits(const JointTable& t) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < t.p().rows(); ++i) {
    for (Eigen::Index j = 0; j < t.p().cols(); ++j) {
      const double v = t.p()(i, j);
      if (v > 0.0) h -= v * std::log2(v);
    }
  }
  return h;
}
}  // namespace

ReferenceJoint::ReferenceJoint(std::vector<JointTable> per_dimension)
    : tables_(std::move(per_dimension)) {
  if (tables_.empty()) {
    throw validation_error("InvalidArguments", "reference joint needs >= 1 dimension");
  }
  double shx = 0.0, shy = 0.0, shxy = 0.0;
  for (const auto& t : tables_) {
    marg_x_.push_back(t.marginal_x());
    marg_y_.push_back(t.marginal_y());
    const double hx = entropy(marg_x_.back());
    const double hy = entropy(marg_y_.back());
    const double hxy = entropy_of_table_bits(t);
    shx += hx;
    shy += hy;
    shxy += hxy;
    sum_mi_ += std::max(hx + hy - hxy, 0.0);
  }
  const double n = static_cast<double>(tables_.size());
  mean_hx_ = shx / n;
  mean_hy_ = shy / n;
  mean_hxy_ = shxy / n;
}

ReferenceJoint ReferenceJoint::iid(const JointTable& table, int n) {
  if (n < 1) throw validation_error("InvalidArguments", "need n >= 1 dimensions");
  return ReferenceJoint(std::vector<JointTable>(static_cast<std::size_t>(n), table));
}

namespace {
const ReferenceJoint& check_dims(const ReferenceJoint& ref, int n) {
  if (ref.dims() != n) {
    throw validation_error("DimensionMismatch",
                           "reference has " + std::to_string(ref.dims()) +
                               " dimensions, sequences have " + std::to_string(n));
  }
  return ref;
}
}  // namespace

bool matching_membership(const std::vector<int>& x_seq, const std::vector<int>& y_seq,
                         const ReferenceJoint& ref, double epsilon) {
  if (x_seq.size() != y_seq.size()) {
    throw validation_error("DimensionMismatch", "x and y sequence lengths differ");
  }
  const int n = static_cast<int>(x_seq.size());
  check_dims(ref, n);
  double sx = 0.0, sy = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    const JointTable& t = ref.table(i);
    const int xs = x_seq[static_cast<std::size_t>(i)];
    const int ys = y_seq[static_cast<std::size_t>(i)];
    if (xs < 0 || xs >= t.nx() || ys < 0 || ys >= t.ny()) {
      throw validation_error("DimensionMismatch", "symbol outside reference alphabet");
    }
    const double px = ref.marginal_x(i)[static_cast<std::size_t>(xs)];
    const double py = ref.marginal_y(i)[static_cast<std::size_t>(ys)];
    const double pxy = t.p()(xs, ys);
    // Zero-probability symbols push the empirical rate to infinity, which
    // simply fails the strict comparison below.
    if (px <= 0.0 || py <= 0.0 || pxy <= 0.0) return false;
    sx -= std::log2(px);
    sy -= std::log2(py);
    sxy -= std::log2(pxy);
  }
  const double inv_n = 1.0 / n;
  return std::abs(sx * inv_n - ref.mean_hx_bits()) < epsilon &&
         std::abs(sy * inv_n - ref.mean_hy_bits()) < epsilon &&
         std::abs(sxy * inv_n - ref.mean_hxy_bits()) < epsilon;
}

TypicalityProbability typicality_probability(const ReferenceJoint& ref, int n,
                                             double epsilon, DrawMode mode,
                                             std::size_t trials, RngSeed seed) {
  check_dims(ref, n);
  if (trials < 100) {
    throw validation_error("InvalidArguments", "need >= 100 trials");
  }
  // Flattened per-dimension samplers.
  std::vector<std::vector<double>> joint_weights(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Matrix& p = ref.table(i).p();
    auto& w = joint_weights[static_cast<std::size_t>(i)];
    w.reserve(static_cast<std::size_t>(p.size()));
    for (Eigen::Index a = 0; a < p.rows(); ++a) {
      for (Eigen::Index b = 0; b < p.cols(); ++b) w.push_back(p(a, b));
    }
  }

  std::size_t hits = 0;
  std::vector<int> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_substream(seed, t));
    for (int i = 0; i < n; ++i) {
      const Eigen::Index ny = ref.table(i).ny();
      if (mode == DrawMode::joint_draw) {
        const int flat = rng.categorical(joint_weights[static_cast<std::size_t>(i)]);
        xs[static_cast<std::size_t>(i)] = flat / static_cast<int>(ny);
        ys[static_cast<std::size_t>(i)] = flat % static_cast<int>(ny);
      } else {
        xs[static_cast<std::size_t>(i)] =
            rng.categorical(ref.marginal_x(i).p());
        ys[static_cast<std::size_t>(i)] =
            rng.categorical(ref.marginal_y(i).p());
      }
    }
    if (matching_membership(xs, ys, ref, epsilon)) ++hits;
  }
  TypicalityProbability out;
  out.trials = trials;
  out.p_hat = static_cast<double>(hits) / static_cast<double>(trials);
  out.ci_95 = wilson_interval(out.p_hat, trials);
  return out;
}

double matching_set_log_size_bound(const ReferenceJoint& ref, int n, double epsilon) {
  check_dims(ref, n);
  return n * epsilon + ref.sum_hxy_bits();
}

DecodeOutcome typicality_decode(const std::vector<int>& y_seq,
                                const std::vector<std::vector<int>>& codebook,
                                const std::vector<ReferenceJoint>& ref_models,
                                double epsilon) {
  if (codebook.size() < 2 || codebook.size() != ref_models.size()) {
    throw validation_error("DimensionMismatch",
                           "codebook must cover all states with one reference each");
  }
  int matches = 0;
  int decoded = -1;
  for (std::size_t w = 0; w < codebook.size(); ++w) {
    if (matching_membership(codebook[w], y_seq, ref_models[w], epsilon)) {
      ++matches;
      decoded = static_cast<int>(w);
      if (matches > 1) break;
    }
  }
  DecodeOutcome out;
  if (matches == 1) {
    out.status = DecodeStatus::decoded;
    out.state = decoded;
  } else if (matches == 0) {
    out.status = DecodeStatus::empty;
  } else {
    out.status = DecodeStatus::ambiguous;
  }
  return out;
}

}  // namespace dtmi
