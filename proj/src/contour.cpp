#include "softnet/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace softnet {

void ContourWorld::validate() const {
  if (contour.size() < 2) throw ConfigError("contour: need at least two vertices");
  if (!(force_hi_n > force_lo_n && force_lo_n > 0.0))
    throw ConfigError("contour: need force_hi > force_lo > 0");
  if (slide_step_mm <= 0.0 || wall_stiffness_n_per_mm <= 0.0)
    throw ConfigError("contour: step and stiffness must be positive");
  for (std::size_t i = 0; i + 1 < contour.size(); ++i)
    if ((contour[i + 1] - contour[i]).norm() < 1e-9)
      throw ConfigError("contour: degenerate segment");
}

namespace {

struct Closest {
  Vec2 point;
  Vec2 tangent;  // unit, along the polyline direction
  double arc;    // arclength parameter of the foot point
};

Closest closest_on_polyline(const std::vector<Vec2>& poly, const Vec2& p) {
  Closest best{poly.front(), (poly[1] - poly[0]).normalized(), 0.0};
  double best_d = std::numeric_limits<double>::infinity();
  double arc = 0.0;
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    const Vec2 d = poly[i + 1] - poly[i];
    const double len = d.norm();
    const double s = std::clamp((p - poly[i]).dot(d) / (len * len), 0.0, 1.0);
    const Vec2 q = poly[i] + s * d;
    const double dist = (p - q).norm();
    if (dist < best_d) {
      best_d = dist;
      best = {q, d / len, arc + s * len};
    }
    arc += len;
  }
  return best;
}

double polyline_length(const std::vector<Vec2>& poly) {
  double l = 0.0;
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) l += (poly[i + 1] - poly[i]).norm();
  return l;
}

}  // namespace

ContourResult contour_follow(const ContourWorld& world) {
  world.validate();
  const double total = polyline_length(world.contour);
  const double f_mid = 0.5 * (world.force_lo_n + world.force_hi_n);
  const double k = world.wall_stiffness_n_per_mm;

  // Start just inside the wall at the first vertex, preloaded mid-band.
  const Vec2 t0 = (world.contour[1] - world.contour[0]).normalized();
  const Vec2 n0(-t0.y(), t0.x());  // left normal = free side
  Vec2 p = world.contour.front() - n0 * (f_mid / k);

  ContourResult out;
  Vec2 n_est = n0;
  int lost = 0;
  const int max_steps = static_cast<int>(4.0 * total / world.slide_step_mm) + 200;

  for (int step = 0; step < max_steps; ++step) {
    const Closest c = closest_on_polyline(world.contour, p);
    const Vec2 n_free(-c.tangent.y(), c.tangent.x());
    const double depth = -(p - c.point).dot(n_free);  // >0 inside the material
    const double force = k * std::max(0.0, depth);
    out.force_trace.push_back(force);

    if (force > 0.0) {
      lost = 0;
      n_est = n_free;
      // Reconstruct the wall point from the probe and the force reading.
      out.trajectory.push_back(p + n_est * (force / k));
      if (force >= world.force_lo_n && force <= world.force_hi_n) out.in_band_fraction += 1.0;
    } else if (++lost > world.lost_contact_limit) {
      break;  // abort with the partial trajectory
    }

    if (c.arc >= total - 1e-6 && force > 0.0) {
      out.completed = true;
      break;
    }

    // Normal servo toward mid-band, then a tangential advance.
    const double err_mm = (f_mid - force) / k;
    p -= n_est * std::clamp(err_mm, -world.slide_step_mm, world.slide_step_mm);
    p += c.tangent * world.slide_step_mm;
  }

  std::size_t contact_steps = out.trajectory.size();
  if (contact_steps > 0) out.in_band_fraction /= static_cast<double>(contact_steps);
  return out;
}

double hausdorff_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  if (a.size() < 2 || b.size() < 2) throw DomainError("hausdorff: polylines need two points");
  const auto one_sided = [](const std::vector<Vec2>& from, const std::vector<Vec2>& to) {
    double worst = 0.0;
    for (const Vec2& p : from) worst = std::max(worst, (p - closest_on_polyline(to, p).point).norm());
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

ContourWorld make_arc_world(double radius_mm, double start_deg, double end_deg) {
  ContourWorld w;
  const int n = 128;
  for (int i = 0; i <= n; ++i) {
    const double a = (start_deg + (end_deg - start_deg) * i / n) * M_PI / 180.0;
    w.contour.emplace_back(radius_mm * std::cos(a), radius_mm * std::sin(a));
  }
  return w;
}

ContourWorld make_wall_world(double length_mm) {
  ContourWorld w;
  w.contour = {Vec2(0.0, 0.0), Vec2(length_mm, 0.0)};
  return w;
}

}  // namespace softnet
