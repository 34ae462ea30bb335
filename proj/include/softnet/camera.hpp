#pragma once

#include <array>
#include <optional>
#include <vector>

#include "softnet/geometry.hpp"
#include "softnet/rng.hpp"

namespace softnet {

struct TimingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CameraModel {
  double fx = 290.0, fy = 290.0;  // px
  double cx = 320.0, cy = 180.0;  // px
  int width = 640, height = 360;
  double fps = 330.0;
  // Calibrated so the estimated-pose jitter at 45 mm working distance
  // lands on the published per-resolution fluctuation scale.
  double pixel_noise_sigma = 0.015;  // px

  void validate() const;
  // Intrinsics scaled from the 640x360 default for the supported modes.
  static CameraModel for_resolution(int width, int height);
};

struct MarkerSpec {
  double side_mm = 16.0;
  // Corner order: fixed counter-clockwise winding in the marker plane.
  std::array<Vec3, 4> corners() const {
    const double s = side_mm / 2.0;
    return {Vec3(-s, -s, 0), Vec3(s, -s, 0), Vec3(s, s, 0), Vec3(-s, s, 0)};
  }
};

using Corners = std::array<Vec2, 4>;

// Pinhole projection of the marker corners; optional i.i.d. Gaussian pixel
// noise. Throws VisibilityError when any corner is behind the camera or
// out of frame.
Corners project_marker(const CameraModel& cam, const MarkerSpec& spec,
                       const RigidTransform& pose_cam_marker, Rng* noise = nullptr);

struct PnPResult {
  RigidTransform pose;      // camera-from-marker
  double reproj_rms_px = 0.0;
  int iterations = 0;
};

// Planar-homography initialization refined by damped Gauss-Newton on the
// reprojection error; when a previous pose is supplied it is also tried
// as an initializer and the lower-residual solution wins.
PnPResult estimate_pose_pnp(const CameraModel& cam, const MarkerSpec& spec, const Corners& corners,
                            const RigidTransform* previous = nullptr);

// 6D pose vector relative to a reference: (Dx,Dy,Dz) mm, (Drx,Dry,Drz)
// intrinsic X-Y-Z Euler degrees in (-180, 180].
Vec6 relative_pose_vec(const RigidTransform& pose, const RigidTransform& reference);

// Tracks the marker across a session; the first observation is captured
// as the reference pose p0.
class MarkerSession {
 public:
  MarkerSession(const CameraModel& cam, const MarkerSpec& spec) : cam_(cam), spec_(spec) {}

  // Returns D_t relative to p0 (captured on the first call).
  Vec6 observe(const Corners& corners);
  Vec6 observe_pose(const RigidTransform& pose_cam_marker);
  const std::optional<RigidTransform>& reference() const { return p0_; }

 private:
  CameraModel cam_;
  MarkerSpec spec_;
  std::optional<RigidTransform> p0_;
  std::optional<RigidTransform> prev_;
};

struct MotionFeatures {
  double t_s = 0.0;
  Vec6 pose = Vec6::Zero();       // D
  Vec6 rate = Vec6::Zero();       // per second
  Vec6 accel = Vec6::Zero();      // per second^2
  bool warmup = false;
};

// Causal backward differences over a window of delta_t seconds. The
// timestamps must be uniform at the camera frame period and delta_t a
// multiple of it. Warm-up samples (before two full windows) have their
// rate/accel zero-filled and flagged.
std::vector<MotionFeatures> compute_motion_features(const std::vector<double>& t_s,
                                                    const std::vector<Vec6>& poses,
                                                    double delta_t_s);

}  // namespace softnet
