#include "dtmi/knn_mi.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <thread>
#include <vector>

#include "dtmi/infotheory.hpp"
#include "dtmi/parallel.hpp"

namespace dtmi {

namespace {

constexpr double kLog2E = 1.4426950408889634074;
constexpr Eigen::Index kMaxSamplesPerCall = 50000;
constexpr double kJitterScale = 1e-10;

struct ColumnView {
  // Row-major copies of x and y so the j-loop walks contiguous memory.
  std::vector<double> x, y;
  Eigen::Index n = 0, dx = 0, dy = 0;

  const double* xr(Eigen::Index i) const { return x.data() + i * dx; }
  const double* yr(Eigen::Index i) const { return y.data() + i * dy; }
};

ColumnView flatten(const Matrix& x, const Matrix& y) {
  ColumnView v;
  v.n = x.rows();
  v.dx = x.cols();
  v.dy = y.cols();
  v.x.resize(static_cast<std::size_t>(v.n * v.dx));
  v.y.resize(static_cast<std::size_t>(v.n * v.dy));
  for (Eigen::Index i = 0; i < v.n; ++i) {
    for (Eigen::Index c = 0; c < v.dx; ++c) v.x[static_cast<std::size_t>(i * v.dx + c)] = x(i, c);
    for (Eigen::Index c = 0; c < v.dy; ++c) v.y[static_cast<std::size_t>(i * v.dy + c)] = y(i, c);
  }
  return v;
}

inline double maxnorm(const double* a, const double* b, Eigen::Index d) {
  double m = 0.0;
  for (Eigen::Index c = 0; c < d; ++c) {
    const double diff = std::abs(a[c] - b[c]);
    if (diff > m) m = diff;
  }
  return m;
}

bool has_duplicate_coordinates(const Matrix& m) {
  std::vector<double> col(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) col[static_cast<std::size_t>(i)] = m(i, c);
    std::sort(col.begin(), col.end());
    for (std::size_t i = 1; i < col.size(); ++i) {
      if (col[i] == col[i - 1]) return true;
    }
  }
  return false;
}

void jitter_in_place(Matrix& m, Rng& rng) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double scale = std::max(m.col(c).cwiseAbs().maxCoeff(), 1.0);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      m(i, c) += (2.0 * rng.uniform() - 1.0) * kJitterScale * scale;
    }
  }
}

void check_samples(const PairedSamples& samples, int k) {
  const Eigen::Index n = samples.rows();
  if (n > kMaxSamplesPerCall) {
    throw validation_error("TooManySamples",
                           "brute-force search is guarded at N <= 50000");
  }
  if (k < 1 || n < k + 1) {
    throw validation_error("TooFewSamples",
                           "need N >= k+1 samples (N=" + std::to_string(n) +
                               ", k=" + std::to_string(k) + ")");
  }
}

bool all_rows_identical(const Matrix& x, const Matrix& y) {
  for (Eigen::Index i = 1; i < x.rows(); ++i) {
    if ((x.row(i) - x.row(0)).cwiseAbs().maxCoeff() != 0.0) return false;
    if ((y.row(i) - y.row(0)).cwiseAbs().maxCoeff() != 0.0) return false;
  }
  return true;
}

// Per-point psi terms for every point in [begin, end), written to out[i].
// mode: 0 = ksg1, 1 = ksg2, 2 = mixed.
void neighbor_terms(const ColumnView& v, int k, int mode, Eigen::Index begin,
                    Eigen::Index end, double* out) {
  const Eigen::Index n = v.n;
  std::vector<double> bx(static_cast<std::size_t>(n));
  std::vector<double> by(static_cast<std::size_t>(n));
  // k smallest (distance, index) pairs, ordered; index breaks distance ties.
  std::vector<std::pair<double, Eigen::Index>> nearest(static_cast<std::size_t>(k));

  const bool univariate = v.dx == 1 && v.dy == 1;

  for (Eigen::Index i = begin; i < end; ++i) {
    const double* xi = v.xr(i);
    const double* yi = v.yr(i);

    // Pass 1: marginal distance buffers (vectorizes cleanly for d = 1).
    if (univariate) {
      const double x0 = xi[0];
      const double y0 = yi[0];
      const double* xs = v.x.data();
      const double* ys = v.y.data();
      for (Eigen::Index j = 0; j < n; ++j) {
        bx[static_cast<std::size_t>(j)] = std::abs(x0 - xs[j]);
        by[static_cast<std::size_t>(j)] = std::abs(y0 - ys[j]);
      }
    } else {
      for (Eigen::Index j = 0; j < n; ++j) {
        bx[static_cast<std::size_t>(j)] = maxnorm(xi, v.xr(j), v.dx);
        by[static_cast<std::size_t>(j)] = maxnorm(yi, v.yr(j), v.dy);
      }
    }
    // Own-row sentinels keep point i out of the neighbor scan and counts.
    bx[static_cast<std::size_t>(i)] = std::numeric_limits<double>::infinity();
    by[static_cast<std::size_t>(i)] = std::numeric_limits<double>::infinity();

    // Pass 2: k smallest joint distances, ties broken by index.
    int filled = 0;
    double kth = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      const double dxj = bx[static_cast<std::size_t>(j)];
      const double dyj = by[static_cast<std::size_t>(j)];
      const double dz = dxj > dyj ? dxj : dyj;
      if (dz >= kth && filled == k) continue;
      const std::pair<double, Eigen::Index> cand{dz, j};
      if (filled < k) {
        nearest[static_cast<std::size_t>(filled++)] = cand;
        if (filled == k) {
          std::sort(nearest.begin(), nearest.end());
          kth = nearest.back().first;
        }
      } else if (cand < nearest.back()) {
        int pos = k - 1;
        while (pos > 0 && cand < nearest[static_cast<std::size_t>(pos - 1)]) {
          nearest[static_cast<std::size_t>(pos)] = nearest[static_cast<std::size_t>(pos - 1)];
          --pos;
        }
        nearest[static_cast<std::size_t>(pos)] = cand;
        kth = nearest.back().first;
      }
    }
    const double rho = nearest.back().first;

    double term = 0.0;
    if (mode == 1) {  // ksg2: projected marginal radii, inclusive counts
      double ex = 0.0, ey = 0.0;
      for (int t = 0; t < k; ++t) {
        const Eigen::Index j = nearest[static_cast<std::size_t>(t)].second;
        ex = std::max(ex, bx[static_cast<std::size_t>(j)]);
        ey = std::max(ey, by[static_cast<std::size_t>(j)]);
      }
      int n_x = 0, n_y = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        n_x += bx[static_cast<std::size_t>(j)] <= ex;
        n_y += by[static_cast<std::size_t>(j)] <= ey;
      }
      term = digamma(n_x) + digamma(n_y);
    } else if (mode == 2 && rho == 0.0) {  // mixed, discrete atom branch
      int k_tilde = 0, n_x = 0, n_y = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const bool zx = bx[static_cast<std::size_t>(j)] == 0.0;
        const bool zy = by[static_cast<std::size_t>(j)] == 0.0;
        n_x += zx;
        n_y += zy;
        k_tilde += zx && zy;
      }
      term = digamma(n_x + 1) + digamma(n_y + 1) - digamma(k_tilde);
    } else {  // ksg1 rule: strict counts against the k-th joint distance
      int n_x = 0, n_y = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        n_x += bx[static_cast<std::size_t>(j)] < rho;
        n_y += by[static_cast<std::size_t>(j)] < rho;
      }
      term = digamma(n_x + 1) + digamma(n_y + 1);
      if (mode == 2) term -= digamma(k);
    }
    out[i] = term;
  }
}

// Deterministic regardless of thread count: fixed chunking, per-point
// outputs merged in index order.
std::vector<double> all_neighbor_terms(const ColumnView& v, int k, int mode) {
  const Eigen::Index n = v.n;
  std::vector<double> terms(static_cast<std::size_t>(n), 0.0);
  const unsigned workers = static_cast<unsigned>(max_worker_threads());
  if (workers == 1 || n < 256) {
    neighbor_terms(v, k, mode, 0, n, terms.data());
    return terms;
  }
  std::vector<std::thread> pool;
  const Eigen::Index chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const Eigen::Index b = static_cast<Eigen::Index>(w) * chunk;
    const Eigen::Index e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back(neighbor_terms, std::cref(v), k, mode, b, e, terms.data());
  }
  for (auto& t : pool) t.join();
  return terms;
}

MIEstimate ksg_common(const PairedSamples& samples, int k, RngSeed seed, int mode,
                      EstimatorId id) {
  check_samples(samples, k);
  Matrix x = samples.x();
  Matrix y = samples.y();
  const Eigen::Index n = x.rows();

  if (mode != 2) {
    if (all_rows_identical(x, y)) {
      throw validation_error("DegenerateData", "all sample points are identical");
    }
    if (has_duplicate_coordinates(x) || has_duplicate_coordinates(y)) {
      Rng rng(seed);
      jitter_in_place(x, rng);
      jitter_in_place(y, rng);
    }
  }

  const ColumnView v = flatten(x, y);
  const std::vector<double> terms = all_neighbor_terms(v, k, mode);
  double mean_term = 0.0;
  for (double t : terms) mean_term += t;
  mean_term /= static_cast<double>(n);

  double nats = 0.0;
  switch (mode) {
    case 0: nats = digamma(k) + digamma(static_cast<double>(n)) - mean_term; break;
    case 1:
      nats = digamma(k) - 1.0 / k + digamma(static_cast<double>(n)) - mean_term;
      break;
    case 2: nats = digamma(static_cast<double>(n)) - mean_term; break;
  }
  return MIEstimate::make(nats * kLog2E, id, k, static_cast<std::size_t>(n));
}

}  // namespace

MIEstimate ksg1(const PairedSamples& samples, int k, RngSeed seed) {
  return ksg_common(samples, k, seed, 0, EstimatorId::ksg1);
}

MIEstimate ksg2(const PairedSamples& samples, int k, RngSeed seed) {
  return ksg_common(samples, k, seed, 1, EstimatorId::ksg2);
}

MIEstimate mixed_ksg(const PairedSamples& samples, int k) {
  return ksg_common(samples, k, RngSeed{}, 2, EstimatorId::mixed_ksg);
}

MIEstimate estimate_dtmi(const PairedSamples& samples, const EstimatorConfig& config,
                         RngSeed seed) {
  auto run = [&](const PairedSamples& s, RngSeed sub) -> MIEstimate {
    switch (config.estimator_id) {
      case EstimatorId::ksg1: return ksg1(s, config.k, sub);
      case EstimatorId::ksg2: return ksg2(s, config.k, sub);
      case EstimatorId::mixed_ksg: return mixed_ksg(s, config.k);
      default:
        throw validation_error("UnknownEstimator",
                               "estimate_dtmi needs a k-NN estimator");
    }
  };

  if (config.aggregation == Aggregation::joint) {
    return run(samples, seed);
  }
  if (samples.x().cols() != samples.y().cols()) {
    throw validation_error("DimensionMismatch",
                           "per_dimension_sum needs matching x/y dimensions");
  }
  double raw_sum = 0.0;
  for (Eigen::Index c = 0; c < samples.x().cols(); ++c) {
    PairedSamples col(samples.x().col(c), samples.y().col(c));
    raw_sum += run(col, derive_substream(seed, static_cast<std::uint64_t>(c))).raw_bits;
  }
  return MIEstimate::make(raw_sum, config.estimator_id, config.k,
                          static_cast<std::size_t>(samples.rows()));
}

int count_within_maxnorm(const Matrix& points, Eigen::Index center_index,
                         double radius, bool strict) {
  if (radius < 0.0) {
    throw validation_error("InvalidArguments", "radius must be >= 0");
  }
  int count = 0;
  for (Eigen::Index j = 0; j < points.rows(); ++j) {
    if (j == center_index) continue;
    const double d = (points.row(j) - points.row(center_index)).cwiseAbs().maxCoeff();
    if (strict ? (d < radius) : (d <= radius)) ++count;
  }
  return count;
}

NeighborCounts neighbor_counts_ksg1(const PairedSamples& samples, int k) {
  check_samples(samples, k);
  const Matrix& x = samples.x();
  const Matrix& y = samples.y();
  const Eigen::Index n = x.rows();
  NeighborCounts out;
  out.n_x.reserve(static_cast<std::size_t>(n));
  out.n_y.reserve(static_cast<std::size_t>(n));
  out.kth_distance.reserve(static_cast<std::size_t>(n));
  std::vector<double> dz;
  dz.reserve(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    dz.clear();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dx = (x.row(j) - x.row(i)).cwiseAbs().maxCoeff();
      const double dy = (y.row(j) - y.row(i)).cwiseAbs().maxCoeff();
      dz.push_back(dx > dy ? dx : dy);
    }
    std::nth_element(dz.begin(), dz.begin() + (k - 1), dz.end());
    const double rho = dz[static_cast<std::size_t>(k - 1)];
    out.kth_distance.push_back(rho);
    out.n_x.push_back(count_within_maxnorm(x, i, rho, true));
    out.n_y.push_back(count_within_maxnorm(y, i, rho, true));
  }
  return out;
}

}  // namespace dtmi
