#pragma once

#include <vector>

#include "softnet/common.hpp"

namespace softnet {

// Planar contour-following world: a directed polyline wall with material
// on its right side and free space on its left.
struct ContourWorld {
  std::vector<Vec2> contour;  // mm, directed
  double force_lo_n = 3.0;
  double force_hi_n = 4.0;
  double slide_step_mm = 0.5;
  double wall_stiffness_n_per_mm = 1.0;  // contact normal stiffness
  int lost_contact_limit = 40;           // abort after this many free steps

  void validate() const;
};

struct ContourResult {
  std::vector<Vec2> trajectory;     // reconstructed contact points
  std::vector<double> force_trace;  // ||F_xy|| at every control step
  bool completed = false;           // reached the end of the contour
  double in_band_fraction = 0.0;    // of in-contact steps
};

// Slides a probe along the wall, servoing the normal offset to keep the
// contact force inside [force_lo, force_hi], and reconstructs the wall
// from the probe position plus the force-inferred penetration.
ContourResult contour_follow(const ContourWorld& world);

// Symmetric Hausdorff distance between two polylines (point-to-segment).
double hausdorff_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

// Convenience worlds used by demos and tests.
ContourWorld make_arc_world(double radius_mm, double start_deg, double end_deg);
ContourWorld make_wall_world(double length_mm);

}  // namespace softnet
