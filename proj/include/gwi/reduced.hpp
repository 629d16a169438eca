#pragma once

#include <cmath>

// Closed-form quadripartite objectives obtained by restricting the
// expectation-value form of the 4-party GWI to one-parameter families of
// settings. Each equals the full evaluation on the corresponding state and
// settings (see reduced_settings in optimize.hpp).

namespace gwi {

// GHZ4, XY plane, sum_i phi_i = alpha and phi'_i = phi_i + beta.
template <typename Scalar>
Scalar ghz_reduced(Scalar alpha, Scalar beta) {
  using std::cos;
  return cos(alpha) - cos(alpha + 4 * beta) - 4 * cos(alpha + beta);
}

// Cluster4, XZ plane, phi1 = -phi2 = -phi3 = phi4, phi'1 = -phi'3,
// phi'2 = -phi'4 and phi'1 + phi'2 = 2 pi.
template <typename Scalar>
Scalar cluster_reduced(Scalar phi1, Scalar phi1p) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(phi1), cp = cos(phi1p);
  const Scalar c2 = c * c, cp2 = cp * cp;
  return c2 * c2 - cp2 * cp2 - 2 * cp2 - 2 * c2 + 4 * cp2 * cp - 4 * c2 * cp - 4 * c2 * c * cp -
         4 * c * cp + 8 * c * sin(phi1) * sin(phi1p);
}

// W4, XZ plane, phi1 = 0, phi2 = phi4 and phi'2 = phi'4.
template <typename Scalar>
Scalar w_reduced(Scalar p1p, Scalar p2, Scalar p2p, Scalar p3, Scalar p3p) {
  using std::cos;
  const Scalar h = Scalar(1) / 2, q = Scalar(1) / 4, e = Scalar(1) / 8;
  Scalar s = 0;
  s += q * cos(2 * p2) + q * cos(2 * p2p) - e * cos(2 * p2 - p3) + e * cos(2 * p2 - p3p);
  s += h * cos(p1p + 2 * p2 + p3) + h * cos(p1p + 2 * p2p + p3p);
  s += q * cos(p2 + p2p - p3) + q * cos(p2 - p2p + p3) + h * cos(p1p + p2) + h * cos(p1p + p2p);
  s += h * cos(p1p + p3) + 3 * h * cos(p2 + p2p);
  s += h * cos(p1p + p3p) + h * cos(p2 + p3) + 3 * h * cos(p2 + p3p) + 3 * h * cos(p2p + p3);
  s += h * cos(p2p + p3p) + e * cos(p1p - 2 * p2 - p3);
  s += e * cos(p1p + 2 * p2 - p3) + e * cos(p1p - 2 * p2p - p3p) + e * cos(p1p + 2 * p2p - p3p);
  s += q * cos(p2 - p2p - p3) - 2 * cos(p2) - 5 * q * cos(p3);
  s += q * cos(p3p) - h * cos(p1p - p2) + h * cos(p1p + 2 * p2) - h * cos(p1p - p2p);
  s += -h * cos(p1p + 2 * p2p) - q * cos(p1p - p3) - h * cos(p2 - p2p);
  s += -q * cos(p1p - p3p) - h * cos(p2 - p3) - h * cos(p2 - p3p) - h * cos(p2p - p3);
  s += -5 * e * cos(2 * p2 + p3) - h * cos(p2p - p3p);
  s += 9 * e * cos(2 * p2 + p3p) - h * cos(2 * p2p + p3p) + cos(p1p + p2 + p3);
  s += -cos(p1p + p2p + p3p) + 9 * q * cos(p2 + p2p + p3) - 3 * h;
  return s;
}

}  // namespace gwi
