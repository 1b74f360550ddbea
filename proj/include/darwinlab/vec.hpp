#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

namespace darwinlab {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double pi = std::numbers::pi;
inline constexpr double four_pi = 4.0 * std::numbers::pi;

}  // namespace darwinlab
