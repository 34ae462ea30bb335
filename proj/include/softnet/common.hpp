#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace softnet {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// 6D force/torque: (Fx, Fy, Fz) in N, (Tx, Ty, Tz) in Nm.
struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();

  Vec6 as_vec() const {
    Vec6 w;
    w << force, torque;
    return w;
  }
  static Wrench from_vec(const Vec6& w) {
    Wrench out;
    out.force = w.head<3>();
    out.torque = w.tail<3>();
    return out;
  }
};

struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ModeError : std::logic_error {
  using std::logic_error::logic_error;
};

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  SolverError(const std::string& msg, double residual)
      : std::runtime_error(msg), residual_norm(residual) {}
  double residual_norm = 0.0;
};

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct VisibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EstimationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace softnet
