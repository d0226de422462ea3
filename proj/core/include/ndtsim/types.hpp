#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace ndtsim {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

inline constexpr double kGravity = 9.81;  // m/s^2

}  // namespace ndtsim
