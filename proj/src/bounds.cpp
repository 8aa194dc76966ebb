#include "dtmi/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dtmi/infotheory.hpp"

namespace dtmi {

CrossMIMatrix::CrossMIMatrix(Matrix terms_bits) : terms_(std::move(terms_bits)) {
  if (terms_.rows() != terms_.cols() || terms_.rows() < 2) {
    throw validation_error("DimensionMismatch", "cross-MI matrix must be square, m >= 2");
  }
  for (Eigen::Index j = 0; j < terms_.rows(); ++j) {
    for (Eigen::Index k = 0; k < terms_.cols(); ++k) {
      if (j == k) continue;
      const double v = terms_(j, k);
      if (!std::isfinite(v) || v < 0.0) {
        throw validation_error("InvalidArguments",
                               "off-diagonal cross-MI terms must be finite and >= 0");
      }
    }
  }
}

namespace {
void check_fano_args(double h_w_bits, double dtmi_bits, int m) {
  if (!(h_w_bits >= 0.0) || !(dtmi_bits >= 0.0) || m < 2) {
    throw validation_error("InvalidArguments",
                           "need h_w >= 0, dtmi >= 0 and m >= 2");
  }
}
}  // namespace

double fano_lower_relaxed(double h_w_bits, double dtmi_bits, int m) {
  check_fano_args(h_w_bits, dtmi_bits, m);
  const double v = (h_w_bits - dtmi_bits - 1.0) / std::log2(static_cast<double>(m));
  return std::clamp(v, 0.0, 1.0);
}

double fano_lower_tight(double h_w_bits, double dtmi_bits, int m) {
  check_fano_args(h_w_bits, dtmi_bits, m);
  const double target = h_w_bits - dtmi_bits;
  if (target <= 0.0) return 0.0;
  const double log2m = std::log2(static_cast<double>(m));
  if (target > log2m + 1.0) {
    throw infeasible_error("Infeasible",
                           "h_w - dtmi exceeds log2(m) + 1; no error probability "
                           "is consistent with these inputs");
  }
  // f(P) = P log2 m + H(P) increases on [0, m/(m+1)] up to log2(m+1); past
  // that value the inequality has no solution either.
  const double p_top = static_cast<double>(m) / (m + 1.0);
  auto f = [&](double p) { return p * log2m + binary_entropy(p); };
  if (target > f(p_top)) {
    throw infeasible_error("Infeasible",
                           "h_w - dtmi exceeds log2(m+1); the Fano inequality has "
                           "no admissible solution");
  }
  double lo = 0.0, hi = p_top;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

BoundReport typicality_upper_bound(const CrossMIMatrix& cross_mi, const StateSpace& prior,
                                   int n, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw validation_error("NonPositiveEpsilon", "epsilon must be > 0");
  }
  if (n < 1) throw validation_error("InvalidArguments", "n must be >= 1");
  if (cross_mi.m() != prior.size()) {
    throw validation_error("DimensionMismatch",
                           "cross-MI matrix dimension differs from state count");
  }
  const int m = cross_mi.m();
  // log2 of sum_k p(w_k) sum_{j != k} 2^{3 n eps - terms(j,k)} via logsumexp.
  double max_exp = -std::numeric_limits<double>::infinity();
  std::vector<double> exps;
  exps.reserve(static_cast<std::size_t>(m) * (m - 1));
  for (int k = 0; k < m; ++k) {
    const double pk = prior.prior(k);
    if (pk == 0.0) continue;
    for (int j = 0; j < m; ++j) {
      if (j == k) continue;
      const double e = 3.0 * n * epsilon - cross_mi.terms()(j, k) + std::log2(pk);
      exps.push_back(e);
      max_exp = std::max(max_exp, e);
    }
  }
  double sum = 0.0;
  if (!exps.empty() && std::isfinite(max_exp)) {
    for (double e : exps) sum += std::exp2(e - max_exp);
  }
  const double total = exps.empty() ? 0.0 : std::exp2(max_exp + std::log2(sum));
  BoundReport report;
  report.upper_raw = epsilon + total;
  report.upper_clamped = std::min(report.upper_raw, 1.0);
  report.epsilon = epsilon;
  report.n = n;
  report.m = m;
  return report;
}

LosslessReport lossless_condition(int m, int n, const Matrix& averaged_cross_mi_bits,
                                  double epsilon) {
  if (epsilon < 0.0) {
    throw validation_error("InvalidArguments", "epsilon must be >= 0");
  }
  if (m < 2 || n < 1) {
    throw validation_error("InvalidArguments", "need m >= 2 and n >= 1");
  }
  if (averaged_cross_mi_bits.rows() != m || averaged_cross_mi_bits.cols() != m) {
    throw validation_error("DimensionMismatch",
                           "averaged cross-MI matrix must be m x m");
  }
  double min_off = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      if (j != k) min_off = std::min(min_off, averaged_cross_mi_bits(j, k));
    }
  }
  LosslessReport report;
  report.rate_bits = std::log2(static_cast<double>(m)) / n;
  report.threshold_bits = min_off - 3.0 * epsilon;
  report.margin_bits = report.threshold_bits - report.rate_bits;
  report.satisfied = report.margin_bits > 0.0;
  return report;
}

PreprocessingVerdict preprocessing_check(double h_w_bits, double i_x_d_bits) {
  if (!(h_w_bits >= 0.0) || !(i_x_d_bits >= 0.0)) {
    throw validation_error("InvalidArguments", "entropies and MI must be >= 0");
  }
  return (h_w_bits - i_x_d_bits > 1.0) ? PreprocessingVerdict::lossless_impossible
                                       : PreprocessingVerdict::inconclusive;
}

std::string to_string(PreprocessingVerdict v) {
  return v == PreprocessingVerdict::lossless_impossible ? "lossless_impossible"
                                                        : "inconclusive";
}

ComparisonReport compare_features(const PairedSamples& samples_a,
                                  const PairedSamples& samples_b,
                                  const EstimatorConfig& config,
                                  double state_entropy_bits, int m, RngSeed seed) {
  ComparisonReport report;
  report.dtmi_a = estimate_dtmi(samples_a, config, derive_substream(seed, 0));
  report.dtmi_b = estimate_dtmi(samples_b, config, derive_substream(seed, 1));
  report.fano_lower_a = fano_lower_tight(state_entropy_bits, report.dtmi_a.bits, m);
  report.fano_lower_b = fano_lower_tight(state_entropy_bits, report.dtmi_b.bits, m);
  const double diff = report.dtmi_a.bits - report.dtmi_b.bits;
  if (std::abs(diff) <= kFeatureTieToleranceBits) {
    report.preferred = -1;
  } else {
    report.preferred = diff > 0.0 ? 0 : 1;
  }
  return report;
}

}  // namespace dtmi
