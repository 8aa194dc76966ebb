#include <doctest.h>

#include <cmath>

#include "dtmi/typicality.hpp"
#include "helpers.hpp"

using namespace dtmi;

namespace {
JointTable bsc_uniform_joint(double crossover) {
  Matrix j(2, 2);
  j << 0.5 * (1 - crossover), 0.5 * crossover,
       0.5 * crossover, 0.5 * (1 - crossover);
  return JointTable(j);
}

// Exact membership probability of an iid joint draw from the uniform-input
// BSC reference: only the joint condition binds and it depends on the flip
// count alone.
double exact_member_prob(int n, double p, double eps) {
  const double d = std::log2((1.0 - p) / p);
  const double h = -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
  const double c = h + std::log2(1.0 - p);
  double total = 0.0;
  for (int k = 0; k <= n; ++k) {
    if (std::abs(k * d / n - c) < eps) {
      total += std::exp(dtmi::testing::log_binom_pmf(n, k, p));
    }
  }
  return total;
}
}  // namespace

TEST_SUITE("typicality") {

TEST_CASE("deterministic reference: the forced pair is always a member") {
  Matrix point = Matrix::Zero(2, 2);
  point(1, 0) = 1.0;  // all mass on (x=1, y=0)
  const ReferenceJoint ref = ReferenceJoint::iid(JointTable(point), 4);
  CHECK(matching_membership({1, 1, 1, 1}, {0, 0, 0, 0}, ref, 1e-6));
  // A zero-probability symbol fails membership rather than raising.
  CHECK(!matching_membership({1, 1, 0, 1}, {0, 0, 0, 0}, ref, 1e-6));
  CHECK(!matching_membership({1, 1, 1, 1}, {0, 1, 0, 0}, ref, 1e-6));
}

TEST_CASE("membership frequency matches the exact binomial oracle at n=200") {
  // The spec's sketch guessed >= 0.9 here; the exact probability is 0.87621,
  // so the test freezes the oracle value instead (Lemma 2 only promises the
  // limit; see also the n=500 acceptance pin).
  const int n = 200;
  const double exact = exact_member_prob(n, 0.1, 0.1);
  CHECK(exact == doctest::Approx(0.8762132727894918).epsilon(1e-12));
  const ReferenceJoint ref = ReferenceJoint::iid(bsc_uniform_joint(0.1), n);
  const TypicalityProbability mc =
      typicality_probability(ref, n, 0.1, DrawMode::joint_draw, 1000, RngSeed{41, 0});
  CHECK(mc.p_hat >= exact - 3.0 * mc.ci_95.half_width());
  CHECK(mc.p_hat <= exact + 3.0 * mc.ci_95.half_width());
}

TEST_CASE("joint-draw membership frequency is non-decreasing in n") {
  double prev = 0.0;
  for (int n : {50, 200, 800}) {
    const ReferenceJoint ref = ReferenceJoint::iid(bsc_uniform_joint(0.1), n);
    std::vector<double> freqs;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      freqs.push_back(typicality_probability(ref, n, 0.1, DrawMode::joint_draw, 400,
                                             RngSeed{42, seed})
                          .p_hat);
    }
    const double med = dtmi::testing::median(freqs);
    CHECK(med >= prev);
    prev = med;
  }
  CHECK(prev >= 0.95);  // n = 800 end of the trend
}

TEST_CASE("product draw obeys the Lemma 4 bound") {
  // Strong-MI reference: the bound is tiny and so is the frequency.
  const int n = 500;
  const ReferenceJoint strong = ReferenceJoint::iid(bsc_uniform_joint(0.1), n);
  const TypicalityProbability mc = typicality_probability(
      strong, n, 0.1, DrawMode::product_draw, 1000, RngSeed{43, 0});
  const double bound = std::exp2(3.0 * n * 0.1 - strong.sum_mi_bits());
  CHECK(mc.p_hat <= bound + 3.0 * mc.ci_95.half_width());

  // Independent reference: joint and product draws are the same distribution.
  Matrix indep(2, 2);
  indep << 0.25, 0.25, 0.25, 0.25;
  const ReferenceJoint ind = ReferenceJoint::iid(JointTable(indep), 60);
  const TypicalityProbability a =
      typicality_probability(ind, 60, 0.1, DrawMode::joint_draw, 1500, RngSeed{43, 1});
  const TypicalityProbability b =
      typicality_probability(ind, 60, 0.1, DrawMode::product_draw, 1500, RngSeed{43, 2});
  CHECK(std::abs(a.p_hat - b.p_hat) <=
        3.0 * (a.ci_95.half_width() + b.ci_95.half_width()));
}

TEST_CASE("Lemma 4 bound holds across a fuzzed family of references") {
  Rng rng(RngSeed{44, 0});
  for (int trial = 0; trial < 20; ++trial) {
    Matrix j(2, 2);
    double sum = 0.0;
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        j(a, b) = 0.02 + rng.uniform();
        sum += j(a, b);
      }
    }
    const ReferenceJoint ref = ReferenceJoint::iid(JointTable(j / sum), 120);
    const double eps = 0.05 + 0.1 * rng.uniform();
    const TypicalityProbability mc =
        typicality_probability(ref, 120, eps, DrawMode::product_draw, 400,
                               RngSeed{44, static_cast<std::uint64_t>(trial + 1)});
    const double bound = std::exp2(3.0 * 120 * eps - ref.sum_mi_bits());
    CHECK(mc.p_hat <= bound + 3.0 * mc.ci_95.half_width());
  }
}

TEST_CASE("cardinality bound: closed form and exhaustive n=8 enumeration") {
  Matrix point = Matrix::Zero(2, 2);
  point(0, 0) = 1.0;
  CHECK(matching_set_log_size_bound(ReferenceJoint::iid(JointTable(point), 10), 10, 0.1) ==
        doctest::Approx(1.0));

  Matrix exact15(2, 2);  // per-dim H(X,Y) = 1.5 bits
  exact15 << 0.5, 0.25, 0.25, 0.0;
  const ReferenceJoint rr = ReferenceJoint::iid(JointTable(exact15), 10);
  CHECK(rr.mean_hxy_bits() == doctest::Approx(1.5));
  CHECK(matching_set_log_size_bound(rr, 10, 0.1) == doctest::Approx(16.0));

  // Exhaustive check at n=8 over all 4^8 binary pairs.
  const int n = 8;
  const ReferenceJoint ref = ReferenceJoint::iid(bsc_uniform_joint(0.1), n);
  const double log_bound = matching_set_log_size_bound(ref, n, 0.1);
  std::size_t members = 0;
  std::vector<int> xs(n), ys(n);
  for (std::size_t code = 0; code < (1u << (2 * n)); ++code) {
    std::size_t c = code;
    for (int i = 0; i < n; ++i) {
      xs[static_cast<std::size_t>(i)] = static_cast<int>(c & 1u);
      ys[static_cast<std::size_t>(i)] = static_cast<int>((c >> 1) & 1u);
      c >>= 2;
    }
    if (matching_membership(xs, ys, ref, 0.1)) ++members;
  }
  CHECK(members >= 1);
  CHECK(std::log2(static_cast<double>(members)) <= log_bound);
}

TEST_CASE("decoder outcomes: unique, ambiguous, empty") {
  // Noiseless identity channel: distinct codewords decode exactly.
  Matrix noiseless = Matrix::Identity(2, 2);
  const JointTable j0 = [&] {
    Matrix j(2, 2);
    j << 1.0, 0.0, 0.0, 0.0;
    return JointTable(j);
  }();
  const JointTable j1 = [&] {
    Matrix j(2, 2);
    j << 0.0, 0.0, 0.0, 1.0;
    return JointTable(j);
  }();
  const std::vector<std::vector<int>> codebook{{0, 0, 0}, {1, 1, 1}};
  const std::vector<ReferenceJoint> refs{ReferenceJoint::iid(j0, 3),
                                         ReferenceJoint::iid(j1, 3)};
  const DecodeOutcome good = typicality_decode({0, 0, 0}, codebook, refs, 0.05);
  CHECK(good.ok());
  CHECK(good.state == 0);
  const DecodeOutcome empty = typicality_decode({0, 1, 0}, codebook, refs, 0.05);
  CHECK(empty.status == DecodeStatus::empty);

  // Identical codewords and references match both candidates.
  const std::vector<std::vector<int>> twin{{0, 0, 0}, {0, 0, 0}};
  const std::vector<ReferenceJoint> twin_refs{refs[0], refs[0]};
  const DecodeOutcome ambiguous = typicality_decode({0, 0, 0}, twin, twin_refs, 0.05);
  CHECK(ambiguous.status == DecodeStatus::ambiguous);
}

TEST_CASE("typicality probability needs enough trials and matching dims") {
  const ReferenceJoint ref = ReferenceJoint::iid(bsc_uniform_joint(0.1), 10);
  CHECK_THROWS_WITH_AS(
      typicality_probability(ref, 10, 0.1, DrawMode::joint_draw, 50, RngSeed{}),
      doctest::Contains("InvalidArguments"), Error);
  CHECK_THROWS_WITH_AS(
      typicality_probability(ref, 12, 0.1, DrawMode::joint_draw, 200, RngSeed{}),
      doctest::Contains("DimensionMismatch"), Error);
  CHECK_THROWS_WITH_AS(matching_membership({0, 1}, {0, 1, 0}, ref, 0.1),
                       doctest::Contains("DimensionMismatch"), Error);
  CHECK_THROWS_WITH_AS(matching_membership({0, 1}, {0, 1}, ref, 0.1),
                       doctest::Contains("DimensionMismatch"), Error);  // wrong n
}

}  // TEST_SUITE
