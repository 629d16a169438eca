#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "gwi/qstate.hpp"

namespace gwi {

// Measurement plane of a one-angle parametrization.
//   XY: cos(phi) sigma_x + sin(phi) sigma_y  (angle from the X axis)
//   XZ: cos(phi) sigma_z + sin(phi) sigma_x  (angle from the Z axis)
enum class Plane { XY, XZ };

Plane parse_plane(std::string_view text);
std::string_view to_string(Plane p);

Observable xy_setting(double phi);
Observable xz_setting(double phi);
Observable plane_setting(Plane plane, double phi);
// Spherical parametrization (polar theta from Z, azimuth phi from X).
Observable sphere_setting(double theta, double phi);

struct SettingPair {
  Observable unprimed;
  Observable primed;
};

// One (a_i, a'_i) pair per party.
class SettingSet {
 public:
  explicit SettingSet(std::vector<SettingPair> pairs);

  int n_parties() const { return static_cast<int>(pairs_.size()); }
  const SettingPair& operator[](int party) const { return pairs_[static_cast<std::size_t>(party)]; }
  const std::vector<SettingPair>& pairs() const { return pairs_; }

  const Observable& get(int party, bool primed) const {
    const SettingPair& p = (*this)[party];
    return primed ? p.primed : p.unprimed;
  }

 private:
  std::vector<SettingPair> pairs_;
};

// angles[i] = (phi_i, phi'_i).
SettingSet setting_set_from_angles(Plane plane, std::span<const std::pair<double, double>> angles);

// Flat layout (phi_1, phi'_1, phi_2, phi'_2, ...). Odd lengths are rejected.
SettingSet setting_set_from_flat(Plane plane, std::span<const double> flat);

}  // namespace gwi
