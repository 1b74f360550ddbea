#pragma once

#include <span>
#include <string>
#include <vector>

#include "darwinlab/vec.hpp"

namespace darwinlab {

enum class RadiationReaction { off, raw, substituted };

RadiationReaction parse_radiation_reaction(const std::string& name);
std::string to_string(RadiationReaction mode);

// (e_alpha / 6 pi) sum_beta e_beta * jerk_beta, the self term beta = alpha included.
std::vector<Vec3> rr_force_raw(std::span<const double> charges, std::span<const Vec3> jerks);

// Radiation reaction with the jerks replaced by the time derivative of the Coulomb accelerations.
// Vanishes identically when every charge-to-mass ratio is the same.
std::vector<Vec3> rr_force_substituted(std::span<const Vec3> positions, std::span<const Vec3> velocities,
                                       std::span<const double> charges, std::span<const double> masses);

}  // namespace darwinlab
