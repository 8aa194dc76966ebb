#ifndef DTMI_BOUNDS_HPP_
#define DTMI_BOUNDS_HPP_

#include "dtmi/core.hpp"
#include "dtmi/knn_mi.hpp"

namespace dtmi {

// terms(j, k) = summed per-dimension cross-MI exponent, in bits, for
// candidate state j against true state k. The diagonal is unused.
class CrossMIMatrix {
 public:
  explicit CrossMIMatrix(Matrix terms_bits);

  const Matrix& terms() const { return terms_; }
  int m() const { return static_cast<int>(terms_.rows()); }

 private:
  Matrix terms_;
};

struct LosslessReport {
  double rate_bits = 0.0;       // log2(m) / n
  double threshold_bits = 0.0;  // min off-diagonal averaged MI - 3 epsilon
  bool satisfied = false;
  double margin_bits = 0.0;     // threshold - rate
};

struct ComparisonReport {
  MIEstimate dtmi_a;
  MIEstimate dtmi_b;
  double fano_lower_a = 0.0;
  double fano_lower_b = 0.0;
  // 0 prefers a, 1 prefers b, -1 indistinguishable within tie tolerance.
  int preferred = -1;
};

inline constexpr double kFeatureTieToleranceBits = 0.02;
inline constexpr double kDefaultEpsilon = 0.05;

// Relaxed Fano bound with H(P_E) bounded by 1 bit, clamped to [0,1].
double fano_lower_relaxed(double h_w_bits, double dtmi_bits, int m);

// Smallest P in [0,1] with P log2(m) + H(P) >= h_w - dtmi, by bisection on
// the increasing branch [0, m/(m+1)] to 1e-10. Zero when h_w <= dtmi.
double fano_lower_tight(double h_w_bits, double dtmi_bits, int m);

// Theorem-level typicality upper bound; the exponential sum is evaluated as
// a base-2 logsumexp so large n epsilon or cross terms cannot overflow.
BoundReport typicality_upper_bound(const CrossMIMatrix& cross_mi, const StateSpace& prior,
                                   int n, double epsilon);

// Rate test for lossless sensing: R = log2(m)/n against the minimum
// off-diagonal averaged cross-MI minus 3 epsilon.
LosslessReport lossless_condition(int m, int n, const Matrix& averaged_cross_mi_bits,
                                  double epsilon);

enum class PreprocessingVerdict { lossless_impossible, inconclusive };

// Lossless sensing is impossible through better preprocessing alone when
// H(W) - I(X;D) exceeds one bit.
PreprocessingVerdict preprocessing_check(double h_w_bits, double i_x_d_bits);

std::string to_string(PreprocessingVerdict v);

// Estimates both features' DTMI and ranks them; ties within
// kFeatureTieToleranceBits are reported as indistinguishable.
ComparisonReport compare_features(const PairedSamples& samples_a,
                                  const PairedSamples& samples_b,
                                  const EstimatorConfig& config,
                                  double state_entropy_bits, int m,
                                  RngSeed seed = RngSeed{});

}  // namespace dtmi

#endif  // DTMI_BOUNDS_HPP_
