#include "gwi/observables.hpp"

#include <cmath>
#include <string>

#include "gwi/error.hpp"

namespace gwi {
namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw DomainError(std::string(what) + ": angle must be finite");
}

}  // namespace

Plane parse_plane(std::string_view text) {
  if (text == "XY" || text == "xy") return Plane::XY;
  if (text == "XZ" || text == "xz") return Plane::XZ;
  throw ValidationError("unknown plane '" + std::string(text) + "' (expected XY or XZ)");
}

std::string_view to_string(Plane p) { return p == Plane::XY ? "XY" : "XZ"; }

Observable xy_setting(double phi) {
  require_finite(phi, "xy_setting");
  return Observable(Eigen::Vector3d(std::cos(phi), std::sin(phi), 0.0));
}

Observable xz_setting(double phi) {
  require_finite(phi, "xz_setting");
  return Observable(Eigen::Vector3d(std::sin(phi), 0.0, std::cos(phi)));
}

Observable plane_setting(Plane plane, double phi) {
  return plane == Plane::XY ? xy_setting(phi) : xz_setting(phi);
}

Observable sphere_setting(double theta, double phi) {
  require_finite(theta, "sphere_setting");
  require_finite(phi, "sphere_setting");
  const double s = std::sin(theta);
  return Observable(Eigen::Vector3d(s * std::cos(phi), s * std::sin(phi), std::cos(theta)));
}

SettingSet::SettingSet(std::vector<SettingPair> pairs) : pairs_(std::move(pairs)) {
  if (pairs_.empty()) throw ArityError("SettingSet: at least one party is required");
}

SettingSet setting_set_from_angles(Plane plane, std::span<const std::pair<double, double>> angles) {
  if (angles.empty()) throw ArityError("setting_set_from_angles: empty angle list");
  std::vector<SettingPair> pairs;
  pairs.reserve(angles.size());
  for (const auto& [phi, phi_p] : angles) {
    pairs.push_back({plane_setting(plane, phi), plane_setting(plane, phi_p)});
  }
  return SettingSet(std::move(pairs));
}

SettingSet setting_set_from_flat(Plane plane, std::span<const double> flat) {
  if (flat.empty() || flat.size() % 2 != 0) {
    throw ArityError("setting_set_from_flat: expected a non-empty even number of angles, got " +
                     std::to_string(flat.size()));
  }
  std::vector<std::pair<double, double>> angles;
  for (std::size_t i = 0; i < flat.size(); i += 2) angles.emplace_back(flat[i], flat[i + 1]);
  return setting_set_from_angles(plane, angles);
}

}  // namespace gwi
