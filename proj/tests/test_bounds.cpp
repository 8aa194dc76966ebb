#include <doctest.h>

#include <cmath>

#include "dtmi/bounds.hpp"
#include "dtmi/infotheory.hpp"
#include "helpers.hpp"

using namespace dtmi;
using dtmi::testing::correlated_gaussian;
using dtmi::testing::fano_root_oracle;

TEST_SUITE("bounds") {

TEST_CASE("relaxed Fano bound arithmetic") {
  CHECK(fano_lower_relaxed(2.0, 0.5, 4) == doctest::Approx(0.25));
  CHECK(fano_lower_relaxed(std::log2(8.0), std::log2(8.0), 8) == doctest::Approx(0.0));
  CHECK(fano_lower_relaxed(1.0, 0.0, 2) == doctest::Approx(0.0));
  CHECK_THROWS_WITH_AS(fano_lower_relaxed(-1.0, 0.0, 2),
                       doctest::Contains("InvalidArguments"), Error);
}

TEST_CASE("tight Fano bound matches the independent root oracle") {
  CHECK(fano_lower_tight(0.5, 0.7, 2) == 0.0);  // vacuous
  // Smallest root of P + H(P) = 1 (oracle value 0.22709219521934819).
  const double root2 = fano_root_oracle(1.0, 2);
  CHECK(fano_lower_tight(1.0, 0.0, 2) == doctest::Approx(root2).epsilon(1e-8));
  CHECK(fano_lower_tight(1.0, 0.0, 2) ==
        doctest::Approx(0.22709219521934819).epsilon(1e-8));
  // Smallest root of 2P + H(P) = 1 (oracle value 0.17053566085030105).
  const double root4 = fano_root_oracle(1.0, 4);
  CHECK(fano_lower_tight(2.0, 1.0, 4) == doctest::Approx(root4).epsilon(1e-8));
  CHECK(fano_lower_tight(2.0, 1.0, 4) ==
        doctest::Approx(0.17053566085030105).epsilon(1e-8));
}

TEST_CASE("tight Fano bound self-consistency and infeasible inputs") {
  for (int m : {2, 3, 4, 9}) {
    const double log2m = std::log2(static_cast<double>(m));
    for (double hw : {0.3 * log2m, 0.7 * log2m, log2m}) {
      for (double mi : {0.0, 0.2 * log2m, 0.9 * log2m}) {
        const double p = fano_lower_tight(hw, mi, m);
        if (p > 0.0) {
          CHECK(p * log2m + binary_entropy(p) >= hw - mi - 1e-8);
        }
      }
    }
  }
  CHECK_THROWS_WITH_AS(fano_lower_tight(4.0, 0.0, 2), doctest::Contains("Infeasible"),
                       Error);
}

TEST_CASE("grid monotonicity and dominance of the Fano bounds") {
  for (int m : {2, 4}) {
    const double log2m = std::log2(static_cast<double>(m));
    double prev_in_h = -1.0;
    for (int a = 0; a < 100; ++a) {
      const double hw = log2m * a / 99.0;
      prev_in_h = -1.0;
      double prev_in_mi = 2.0;
      for (int b = 0; b < 100; ++b) {
        const double mi = log2m * b / 99.0;
        const double tight = fano_lower_tight(hw, mi, m);
        const double relaxed = fano_lower_relaxed(hw, mi, m);
        CHECK(tight >= relaxed - 1e-9);           // dominance
        CHECK(tight <= prev_in_mi + 1e-9);        // non-increasing in dtmi
        prev_in_mi = tight;
        const double tight_h = fano_lower_tight(log2m * b / 99.0, 0.25 * log2m, m);
        CHECK(tight_h >= prev_in_h - 1e-9);       // non-decreasing in h_w
        prev_in_h = tight_h;
      }
    }
  }
}

TEST_CASE("typicality upper bound arithmetic") {
  const StateSpace uniform2 = StateSpace::uniform(2);
  Matrix terms(2, 2);
  terms << 0.0, 5.0, 5.0, 0.0;
  const BoundReport r = typicality_upper_bound(CrossMIMatrix(terms), uniform2, 10, 0.01);
  CHECK(r.upper_raw == doctest::Approx(0.01 + std::exp2(0.3 - 5.0)).epsilon(1e-12));
  CHECK(r.upper_clamped == doctest::Approx(r.upper_raw));

  Matrix zero = Matrix::Zero(2, 2);
  const BoundReport z = typicality_upper_bound(CrossMIMatrix(zero), uniform2, 10, 0.01);
  CHECK(z.upper_raw == doctest::Approx(0.01 + std::exp2(0.3)).epsilon(1e-12));
  CHECK(z.upper_clamped == doctest::Approx(1.0));

  Matrix huge(2, 2);
  huge << 0.0, 1e6, 1e6, 0.0;
  const BoundReport h = typicality_upper_bound(CrossMIMatrix(huge), uniform2, 10, 0.01);
  CHECK(h.upper_raw == doctest::Approx(0.01).epsilon(1e-9));

  CHECK_THROWS_WITH_AS(typicality_upper_bound(CrossMIMatrix(terms), uniform2, 10, 0.0),
                       doctest::Contains("NonPositiveEpsilon"), Error);
}

TEST_CASE("typicality upper bound survives overflow-scale exponents") {
  const StateSpace uniform2 = StateSpace::uniform(2);
  Matrix terms = Matrix::Zero(2, 2);
  const BoundReport r =
      typicality_upper_bound(CrossMIMatrix(terms), uniform2, 1000000, 0.5);
  CHECK(std::isfinite(r.upper_clamped));
  CHECK(r.upper_clamped == doctest::Approx(1.0));
}

TEST_CASE("typicality upper bound is non-increasing in every cross term") {
  const StateSpace uniform3 = StateSpace::uniform(3);
  Matrix terms(3, 3);
  terms << 0, 2, 3, 2, 0, 4, 3, 4, 0;
  double prev = std::numeric_limits<double>::infinity();
  for (double bump = 0.0; bump <= 40.0; bump += 2.5) {
    Matrix t = terms;
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        if (j != k) t(j, k) += bump;
      }
    }
    const double raw = typicality_upper_bound(CrossMIMatrix(t), uniform3, 5, 0.05).upper_raw;
    CHECK(raw <= prev + 1e-12);
    prev = raw;
  }
  CHECK(prev == doctest::Approx(0.05).epsilon(1e-4));  // converges to epsilon
}

TEST_CASE("lossless condition rate and threshold") {
  Matrix avg(9, 9);
  avg.setConstant(1.0);
  const LosslessReport nine = lossless_condition(9, 30, avg, 0.05);
  CHECK(nine.rate_bits == doctest::Approx(0.10566416671474375).epsilon(1e-9));

  Matrix low(2, 2);
  low.setConstant(0.01);
  const LosslessReport bad = lossless_condition(2, 10, low, 0.05);
  CHECK(!bad.satisfied);
  CHECK(bad.margin_bits < 0.0);

  Matrix half(2, 2);
  half.setConstant(0.5);
  const LosslessReport good = lossless_condition(2, 100, half, 0.05);
  CHECK(good.threshold_bits == doctest::Approx(0.35));
  CHECK(good.rate_bits == doctest::Approx(0.01));
  CHECK(good.satisfied);
  CHECK(good.margin_bits == doctest::Approx(0.34));
}

TEST_CASE("preprocessing corollary verdicts") {
  CHECK(preprocessing_check(2.0, 0.5) == PreprocessingVerdict::lossless_impossible);
  CHECK(preprocessing_check(1.0, 1.0) == PreprocessingVerdict::inconclusive);
  CHECK(preprocessing_check(1.5, 0.6) == PreprocessingVerdict::inconclusive);
  CHECK_THROWS_WITH_AS(preprocessing_check(-0.5, 0.0),
                       doctest::Contains("InvalidArguments"), Error);
}

TEST_CASE("dimension mismatches are rejected across the bound operations") {
  Matrix terms(3, 3);
  terms.setZero();
  terms(0, 1) = terms(0, 2) = terms(1, 0) = terms(1, 2) = terms(2, 0) = terms(2, 1) = 1.0;
  CHECK_THROWS_WITH_AS(
      typicality_upper_bound(CrossMIMatrix(terms), StateSpace::uniform(2), 4, 0.05),
      doctest::Contains("DimensionMismatch"), Error);
  CHECK_THROWS_WITH_AS(lossless_condition(2, 4, terms, 0.05),
                       doctest::Contains("DimensionMismatch"), Error);
  Matrix rect(2, 3);
  rect.setZero();
  CHECK_THROWS_WITH_AS((void)CrossMIMatrix(rect), doctest::Contains("DimensionMismatch"),
                       Error);
  Matrix negative = Matrix::Zero(2, 2);
  negative(0, 1) = -0.5;
  CHECK_THROWS_WITH_AS((void)CrossMIMatrix(negative),
                       doctest::Contains("InvalidArguments"), Error);
}

TEST_CASE("compare_features prefers the stronger Gaussian channel") {
  const PairedSamples strong = correlated_gaussian(10000, 0.9, RngSeed{21, 0});
  const PairedSamples weak = correlated_gaussian(10000, 0.3, RngSeed{21, 1});
  EstimatorConfig cfg;
  cfg.estimator_id = EstimatorId::ksg1;
  cfg.k = 3;
  const ComparisonReport r = compare_features(strong, weak, cfg, 1.0, 2, RngSeed{21, 2});
  CHECK(r.preferred == 0);
  CHECK(r.dtmi_a.bits > r.dtmi_b.bits);
  CHECK(r.fano_lower_a <= r.fano_lower_b);

  const ComparisonReport tie = compare_features(strong, strong, cfg, 1.0, 2, RngSeed{21, 3});
  CHECK(tie.preferred == -1);
}

}  // TEST_SUITE
