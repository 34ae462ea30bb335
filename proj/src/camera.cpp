#include "softnet/camera.hpp"

#include <cmath>

#include "softnet/least_squares.hpp"

namespace softnet {

void CameraModel::validate() const {
  if (fx <= 0 || fy <= 0) throw ConfigError("camera: focal lengths must be positive");
  if (cx <= 0 || cx >= width || cy <= 0 || cy >= height)
    throw ConfigError("camera: principal point must lie inside the image");
}

CameraModel CameraModel::for_resolution(int width, int height) {
  if (!((width == 640 && height == 360) || (width == 1280 && height == 720) ||
        (width == 1920 && height == 1080)))
    throw ConfigError("camera: unsupported resolution");
  CameraModel cam;
  const double s = width / 640.0;
  cam.fx = cam.fy = 290.0 * s;
  cam.cx = width / 2.0;
  cam.cy = height / 2.0;
  cam.width = width;
  cam.height = height;
  return cam;
}

Corners project_marker(const CameraModel& cam, const MarkerSpec& spec,
                       const RigidTransform& pose_cam_marker, Rng* noise) {
  cam.validate();
  Corners out;
  const auto corners = spec.corners();
  for (int i = 0; i < 4; ++i) {
    const Vec3 p = pose_cam_marker.apply(corners[i]);
    if (p.z() <= 1e-6) throw VisibilityError("marker corner behind the camera");
    const double u = cam.fx * p.x() / p.z() + cam.cx;
    const double v = cam.fy * p.y() / p.z() + cam.cy;
    if (u < 0 || u >= cam.width || v < 0 || v >= cam.height)
      throw VisibilityError("marker corner out of frame");
    out[i] = Vec2(u, v);
    if (noise && cam.pixel_noise_sigma > 0.0) {
      out[i].x() += noise->gaussian(0.0, cam.pixel_noise_sigma);
      out[i].y() += noise->gaussian(0.0, cam.pixel_noise_sigma);
    }
  }
  return out;
}

namespace {

// Homography from the 4 marker-plane corners to normalized image coords,
// decomposed into an initial camera-from-marker pose.
RigidTransform homography_init(const CameraModel& cam, const MarkerSpec& spec,
                               const Corners& corners) {
  const auto obj = spec.corners();
  Eigen::Matrix<double, 8, 9> a;
  for (int i = 0; i < 4; ++i) {
    const double x = obj[i].x(), y = obj[i].y();
    const double u = (corners[i].x() - cam.cx) / cam.fx;
    const double v = (corners[i].y() - cam.cy) / cam.fy;
    a.row(2 * i) << x, y, 1, 0, 0, 0, -u * x, -u * y, -u;
    a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y, -v;
  }
  const Eigen::JacobiSVD<Eigen::Matrix<double, 8, 9>> svd(a, Eigen::ComputeFullV);
  const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Mat3 hm;
  hm << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);

  Vec3 h1 = hm.col(0), h2 = hm.col(1), h3 = hm.col(2);
  const double lambda = 2.0 / (h1.norm() + h2.norm());
  Vec3 r1 = lambda * h1, r2 = lambda * h2, t = lambda * h3;
  if (t.z() < 0) {
    r1 = -r1;
    r2 = -r2;
    t = -t;
  }
  Mat3 r;
  r.col(0) = r1;
  r.col(1) = r2;
  r.col(2) = r1.cross(r2);
  Eigen::JacobiSVD<Mat3> rsvd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (rsvd.matrixU() * rsvd.matrixV().transpose()).determinant() < 0 ? -1 : 1;
  RigidTransform out;
  out.rotation = rsvd.matrixU() * d * rsvd.matrixV().transpose();
  out.translation = t;
  return out;
}

double reproj_rms(const CameraModel& cam, const MarkerSpec& spec, const Corners& corners,
                  const RigidTransform& pose) {
  const auto obj = spec.corners();
  double ss = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Vec3 p = pose.apply(obj[i]);
    if (p.z() <= 1e-9) return 1e30;
    const Vec2 px(cam.fx * p.x() / p.z() + cam.cx, cam.fy * p.y() / p.z() + cam.cy);
    ss += (px - corners[i]).squaredNorm();
  }
  return std::sqrt(ss / 8.0);
}

PnPResult refine(const CameraModel& cam, const MarkerSpec& spec, const Corners& corners,
                 const RigidTransform& init) {
  const auto obj = spec.corners();
  VecX x0(6);
  x0.head<3>() = matrix_to_axis_angle(init.rotation);
  x0.tail<3>() = init.translation;

  auto eval = [&](const VecX& x, VecX& r) {
    const Mat3 rot = axis_angle_to_matrix(x.head<3>());
    const Vec3 t = x.tail<3>();
    for (int i = 0; i < 4; ++i) {
      const Vec3 p = rot * obj[i] + t;
      const double z = std::max(p.z(), 1e-9);
      r[2 * i] = cam.fx * p.x() / z + cam.cx - corners[i].x();
      r[2 * i + 1] = cam.fy * p.y() / z + cam.cy - corners[i].y();
    }
  };

  LMOptions opts;
  opts.max_iterations = 100;
  opts.relative_tolerance = 1e-14;
  const LMResult lm = levenberg_marquardt_numeric(eval, x0, 8, opts, 1e-7);

  PnPResult out;
  out.pose.rotation = axis_angle_to_matrix(lm.x.head<3>());
  out.pose.translation = lm.x.tail<3>();
  out.reproj_rms_px = lm.residual_norm / std::sqrt(8.0);
  out.iterations = lm.iterations;
  return out;
}

}  // namespace

PnPResult estimate_pose_pnp(const CameraModel& cam, const MarkerSpec& spec, const Corners& corners,
                            const RigidTransform* previous) {
  cam.validate();
  // Degeneracy: the projected quad must have nonvanishing area.
  double area = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Vec2& a = corners[i];
    const Vec2& b = corners[(i + 1) % 4];
    area += a.x() * b.y() - b.x() * a.y();
  }
  if (std::abs(area) < 1e-6) throw EstimationError("degenerate (collinear) marker corners");

  PnPResult best = refine(cam, spec, corners, homography_init(cam, spec, corners));
  if (previous) {
    const PnPResult alt = refine(cam, spec, corners, *previous);
    // Prefer the previous-pose basin on near ties (temporal coherence).
    if (alt.reproj_rms_px < best.reproj_rms_px * (1.0 + 1e-9)) best = alt;
  }
  if (best.reproj_rms_px > 10.0)
    throw EstimationError("pose refinement did not converge (rms " +
                          std::to_string(best.reproj_rms_px) + " px)");
  return best;
}

Vec6 relative_pose_vec(const RigidTransform& pose, const RigidTransform& reference) {
  const RigidTransform rel = pose.compose(reference.inverse());
  Vec6 d;
  d.head<3>() = rel.translation;
  d.tail<3>() = matrix_to_euler_xyz_deg(rel.rotation);
  return d;
}

Vec6 MarkerSession::observe(const Corners& corners) {
  const RigidTransform* prev = prev_ ? &*prev_ : nullptr;
  const PnPResult est = estimate_pose_pnp(cam_, spec_, corners, prev);
  return observe_pose(est.pose);
}

Vec6 MarkerSession::observe_pose(const RigidTransform& pose) {
  if (!p0_) p0_ = pose;
  prev_ = pose;
  return relative_pose_vec(pose, *p0_);
}

std::vector<MotionFeatures> compute_motion_features(const std::vector<double>& t_s,
                                                    const std::vector<Vec6>& poses,
                                                    double delta_t_s) {
  if (t_s.size() != poses.size()) throw TimingError("timestamp/pose length mismatch");
  if (delta_t_s <= 0.0) throw TimingError("delta_t must be positive");
  if (t_s.size() < 2) throw TimingError("need at least two samples");
  const double period = t_s[1] - t_s[0];
  if (period <= 0.0) throw TimingError("non-increasing timestamps");
  for (std::size_t i = 1; i < t_s.size(); ++i)
    if (std::abs(t_s[i] - t_s[i - 1] - period) > 1e-9)
      throw TimingError("non-uniform timestamps");
  const int w = static_cast<int>(std::llround(delta_t_s / period));
  if (w < 1 || std::abs(w * period - delta_t_s) > 1e-9)
    throw TimingError("delta_t must be a multiple of the frame period");

  auto diff6 = [](const Vec6& a, const Vec6& b) {
    Vec6 d = a - b;
    for (int k = 3; k < 6; ++k) d[k] = wrap_angle_deg(d[k]);
    return d;
  };

  const std::size_t n = poses.size();
  std::vector<MotionFeatures> out(n);
  std::vector<Vec6> rates(n, Vec6::Zero());
  for (std::size_t i = 0; i < n; ++i) {
    out[i].t_s = t_s[i];
    out[i].pose = poses[i];
    if (i >= static_cast<std::size_t>(w)) rates[i] = diff6(poses[i], poses[i - w]) / delta_t_s;
    if (i >= static_cast<std::size_t>(2 * w)) {
      out[i].rate = rates[i];
      out[i].accel = (rates[i] - rates[i - w]) / delta_t_s;
    } else {
      out[i].warmup = true;
    }
  }
  // Rates are valid from one window in even though accel needs two; keep
  // the warm-up contract simple: both zero-filled until 2*w.
  return out;
}

}  // namespace softnet
