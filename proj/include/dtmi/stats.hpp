#ifndef DTMI_STATS_HPP_
#define DTMI_STATS_HPP_

#include <cmath>
#include <cstddef>

namespace dtmi {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double half_width() const { return 0.5 * (hi - lo); }
};

// Wilson score interval for a binomial proportion at z = 1.96 (95%).
inline Interval wilson_interval(double p_hat, std::size_t n, double z = 1.959963984540054) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p_hat + z2 / (2.0 * nn)) / denom;
  const double spread =
      z * std::sqrt(p_hat * (1.0 - p_hat) / nn + z2 / (4.0 * nn * nn)) / denom;
  Interval iv;
  iv.lo = center - spread;
  iv.hi = center + spread;
  if (iv.lo < 0.0) iv.lo = 0.0;
  if (iv.hi > 1.0) iv.hi = 1.0;
  return iv;
}

}  // namespace dtmi

#endif  // DTMI_STATS_HPP_
