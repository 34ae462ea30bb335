#pragma once

#include <vector>

#include "softnet/common.hpp"

namespace softnet {

struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();  // mm

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  RigidTransform inverse() const {
    RigidTransform out;
    out.rotation = rotation.transpose();
    out.translation = -(rotation.transpose() * translation);
    return out;
  }
  RigidTransform compose(const RigidTransform& rhs) const {  // this o rhs
    RigidTransform out;
    out.rotation = rotation * rhs.rotation;
    out.translation = rotation * rhs.translation + translation;
    return out;
  }
};

// Intrinsic X-Y-Z Euler angles in degrees: R = Rx(a) * Ry(b) * Rz(c).
Mat3 euler_xyz_deg_to_matrix(const Vec3& angles_deg);
Vec3 matrix_to_euler_xyz_deg(const Mat3& r);  // components in (-180, 180]

double wrap_angle_deg(double a);  // to (-180, 180]

Mat3 axis_angle_to_matrix(const Vec3& axis_angle_rad);
Vec3 matrix_to_axis_angle(const Mat3& r);

// Least-squares rigid transform (Kabsch) mapping `from` onto `to`.
RigidTransform rigid_fit(const std::vector<Vec3>& from, const std::vector<Vec3>& to);

}  // namespace softnet
