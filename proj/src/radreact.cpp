#include "darwinlab/radreact.hpp"

#include "darwinlab/error.hpp"

namespace darwinlab {

RadiationReaction parse_radiation_reaction(const std::string& name) {
  if (name == "off") return RadiationReaction::off;
  if (name == "raw") return RadiationReaction::raw;
  if (name == "substituted") return RadiationReaction::substituted;
  fail(ErrorKind::configuration, "unknown radiation_reaction mode '" + name + "' (expected off, raw or substituted)");
}

std::string to_string(RadiationReaction mode) {
  switch (mode) {
    case RadiationReaction::off: return "off";
    case RadiationReaction::raw: return "raw";
    case RadiationReaction::substituted: return "substituted";
  }
  return "off";
}

std::vector<Vec3> rr_force_raw(std::span<const double> charges, std::span<const Vec3> jerks) {
  require(charges.size() == jerks.size(), "one jerk per particle required");
  Vec3 dipole_jerk = Vec3::Zero();
  for (std::size_t b = 0; b < charges.size(); ++b) dipole_jerk += charges[b] * jerks[b];
  std::vector<Vec3> force;
  force.reserve(charges.size());
  for (double e : charges) force.push_back(e / (6.0 * pi) * dipole_jerk);
  return force;
}

std::vector<Vec3> rr_force_substituted(std::span<const Vec3> positions, std::span<const Vec3> velocities,
                                       std::span<const double> charges, std::span<const double> masses) {
  const std::size_t n = positions.size();
  require(velocities.size() == n && charges.size() == n && masses.size() == n, "per-particle inputs differ in length");
  // The summand is symmetric under swapping the pair, so half the ordered sum is the sum over b < c.
  Vec3 dipole_jerk = Vec3::Zero();
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t c = b + 1; c < n; ++c) {
      const Vec3 sep = positions[b] - positions[c];
      const double dist = sep.norm();
      if (!(dist > 0.0))
        fail(ErrorKind::singularity, "particles " + std::to_string(b) + " and " + std::to_string(c) + " coincide");
      const Vec3 dir = sep / dist;
      const Vec3 rel = velocities[b] - velocities[c];
      const double ratio_gap = charges[b] / masses[b] - charges[c] / masses[c];
      const double strength = ratio_gap * charges[b] * charges[c] / (four_pi * dist * dist * dist);
      dipole_jerk += strength * (rel - 3.0 * dir.dot(rel) * dir);
    }
  }
  std::vector<Vec3> force;
  force.reserve(n);
  for (double e : charges) force.push_back(e / (6.0 * pi) * dipole_jerk);
  return force;
}

}  // namespace darwinlab
