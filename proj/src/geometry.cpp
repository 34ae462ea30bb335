#include "softnet/geometry.hpp"

#include <cmath>

namespace softnet {

namespace {
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;
}  // namespace

double wrap_angle_deg(double a) {
  a = std::fmod(a, 360.0);
  if (a <= -180.0) a += 360.0;
  if (a > 180.0) a -= 360.0;
  return a;
}

Mat3 euler_xyz_deg_to_matrix(const Vec3& angles_deg) {
  const double a = angles_deg[0] * kDegToRad;
  const double b = angles_deg[1] * kDegToRad;
  const double c = angles_deg[2] * kDegToRad;
  return (Eigen::AngleAxisd(a, Vec3::UnitX()) * Eigen::AngleAxisd(b, Vec3::UnitY()) *
          Eigen::AngleAxisd(c, Vec3::UnitZ()))
      .toRotationMatrix();
}

Vec3 matrix_to_euler_xyz_deg(const Mat3& r) {
  // R = Rx(a)*Ry(b)*Rz(c): r02 = sin(b).
  double b = std::asin(std::clamp(r(0, 2), -1.0, 1.0));
  double a, c;
  if (std::abs(std::cos(b)) > 1e-9) {
    a = std::atan2(-r(1, 2), r(2, 2));
    c = std::atan2(-r(0, 1), r(0, 0));
  } else {
    // Gimbal lock: fold roll into yaw.
    a = std::atan2(r(2, 1), r(1, 1));
    c = 0.0;
  }
  return Vec3(wrap_angle_deg(a * kRadToDeg), wrap_angle_deg(b * kRadToDeg),
              wrap_angle_deg(c * kRadToDeg));
}

Mat3 axis_angle_to_matrix(const Vec3& aa) {
  const double angle = aa.norm();
  if (angle < 1e-14) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, aa / angle).toRotationMatrix();
}

Vec3 matrix_to_axis_angle(const Mat3& r) {
  Eigen::AngleAxisd aa(r);
  return aa.angle() * aa.axis();
}

RigidTransform rigid_fit(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
  if (from.size() != to.size() || from.size() < 3)
    throw DomainError("rigid_fit: need >= 3 paired points");
  Vec3 cf = Vec3::Zero(), ct = Vec3::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    cf += from[i];
    ct += to[i];
  }
  cf /= static_cast<double>(from.size());
  ct /= static_cast<double>(to.size());
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) h += (from[i] - cf) * (to[i] - ct).transpose();
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0 ? -1.0 : 1.0;
  RigidTransform out;
  out.rotation = svd.matrixV() * d * svd.matrixU().transpose();
  out.translation = ct - out.rotation * cf;
  return out;
}

}  // namespace softnet
