#include "softnet/protocol.hpp"

#include <cmath>

namespace softnet {

namespace {

Vec3 push_normal(double angle_deg) {
  const double a = angle_deg * M_PI / 180.0;
  return Vec3(std::sin(a), std::cos(a), 0.0);
}

// Arclength positions of the face midline stations.
std::vector<double> station_arclengths(const PolyhedralScaffold& s, FaceId face) {
  const auto& st = s.face_stations(face);
  std::vector<double> arc(st.size(), 0.0);
  for (std::size_t i = 1; i < st.size(); ++i)
    arc[i] = arc[i - 1] + (s.station_point(face, i) - s.station_point(face, i - 1)).norm();
  return arc;
}

std::size_t nearest_station(const PolyhedralScaffold& s, FaceId face, double location_mm) {
  const auto arc = station_arclengths(s, face);
  std::size_t best = 0;
  double best_d = std::abs(arc[0] - location_mm);
  for (std::size_t i = 1; i < arc.size(); ++i) {
    const double d = std::abs(arc[i] - location_mm);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

void LoadProtocol::validate() const {
  if (depth_mm < 0.0) throw ConfigError("protocol: depth must be >= 0");
  if (depth_mm > 0.0 && speed_mm_per_s <= 0.0)
    throw ConfigError("protocol: speed must be > 0 when depth > 0");
  if (cycles < 1) throw ConfigError("protocol: cycles must be >= 1");
  if (probe == ProbeKind::PointForce || probe == ProbeKind::CylindricalRod) {
    if (force_n < 0.0) throw ConfigError("protocol: force must be >= 0");
    if (hold_s <= 0.0) throw ConfigError("protocol: constant-force protocols need hold > 0");
  }
}

double height_z_mm(const PolyhedralScaffold& s, Height h) {
  const double hh = s.spec.height_mm;
  switch (h) {
    case Height::H1: return hh * (1.0 / 6.0);
    case Height::H2: return hh * (1.0 / 3.0);
    case Height::H3: return hh * 0.5;
    case Height::H4: return hh * (11.0 / 12.0);
  }
  return 0.0;
}

namespace {

void run_protocol_impl(ElementNetwork& net, const LoadProtocol& protocol,
                       std::vector<SimFrame>& frames) {
  protocol.validate();
  const auto& scaffold = net.scaffold();
  const double dt = 1.0 / net.config().fps;

  if (std::abs(protocol.tilt_deg) > 0.0)
    net.rotate_body(
        Eigen::AngleAxisd(protocol.tilt_deg * M_PI / 180.0, Vec3::UnitX()).toRotationMatrix());

  if (protocol.probe == ProbeKind::PointForce || protocol.probe == ProbeKind::CylindricalRod) {
    const std::size_t station = nearest_station(scaffold, protocol.face, protocol.location_mm);
    const auto& pair = scaffold.face_stations(protocol.face)[station];
    const Vec3 dir = scaffold.face_inward_normal(protocol.face);
    const int n_steps = std::max(1, static_cast<int>(std::llround(protocol.hold_s / dt)));
    for (int i = 0; i < n_steps; ++i) {
      Load load;
      load.node_forces = {{pair[0], 0.5 * protocol.force_n * dir},
                          {pair[1], 0.5 * protocol.force_n * dir}};
      SimFrame f = net.solve_quasistatic(load, dt);
      frames.push_back(std::move(f));
    }
    return;
  }

  // Displacement-driven flat probe or roller.
  const Vec3 n = push_normal(protocol.angle_deg);
  const double hz = height_z_mm(scaffold, protocol.height);
  // Half-height of the flat probe: one station pitch, so each height window
  // isolates its nearest stations (H4 reaches the apex ridge).
  const double band_half = 6.0;

  double touch;  // probe coordinate along n at first contact
  if (protocol.probe == ProbeKind::FlatProbe) {
    touch = 1e30;
    std::vector<bool> is_base(scaffold.nodes.size(), false);
    for (int b : scaffold.base_nodes) is_base[b] = true;
    for (std::size_t i = 0; i < scaffold.nodes.size(); ++i) {
      if (is_base[i]) continue;  // fixed nodes never take probe load
      if (std::abs(net.positions()[i][2] - hz) > band_half) continue;
      touch = std::min(touch, n.dot(net.positions()[i]));
    }
    if (touch > 1e29) throw ConfigError("probe band contains no nodes at this height");
  } else {
    double outer = 1e30;
    for (const auto& p : net.positions()) outer = std::min(outer, n.dot(p));
    touch = outer;  // cylinder axis coordinate handled below via radius
  }

  const double t_load = protocol.depth_mm / protocol.speed_mm_per_s;
  const double cycle_T = 2.0 * t_load + protocol.hold_s + protocol.wait_between_s;
  const int cycle_steps = static_cast<int>(std::llround(cycle_T / dt));
  const Vec3 axis_dir(std::cos(protocol.angle_deg * M_PI / 180.0),
                      -std::sin(protocol.angle_deg * M_PI / 180.0), 0.0);
  const double roller_radius = 3.5;

  for (int c = 0; c < protocol.cycles; ++c) {
    for (int i = 1; i <= cycle_steps; ++i) {
      const double tc = i * dt;
      double inset;
      if (tc <= t_load)
        inset = protocol.speed_mm_per_s * tc;
      else if (tc <= t_load + protocol.hold_s)
        inset = protocol.depth_mm;
      else if (tc <= 2.0 * t_load + protocol.hold_s)
        inset = protocol.depth_mm - protocol.speed_mm_per_s * (tc - t_load - protocol.hold_s);
      else
        inset = -5.0;  // retracted during the waiting window

      Load load;
      if (protocol.probe == ProbeKind::FlatProbe) {
        PlaneProbe plane;
        plane.normal = n;
        plane.offset_mm = touch + inset;
        plane.band_center_z = hz;
        plane.band_half_mm = band_half;
        load.plane = plane;
      } else {
        CylinderProbe cyl;
        cyl.axis_dir = axis_dir;
        cyl.radius_mm = roller_radius;
        cyl.axis_point = Vec3(0, 0, hz) + n * (touch - roller_radius + inset) -
                         n * n.dot(Vec3(0, 0, hz));
        load.cylinder = cyl;
      }
      SimFrame f = net.solve_quasistatic(load, dt);
      f.probe_position_mm = std::max(inset, 0.0);
      frames.push_back(std::move(f));
    }
  }
}

}  // namespace

std::vector<SimFrame> run_protocol(ElementNetwork& net, const LoadProtocol& protocol) {
  std::vector<SimFrame> frames;
  run_protocol_impl(net, protocol, frames);
  return frames;
}

ProtocolRun run_protocol_partial(ElementNetwork& net, const LoadProtocol& protocol) {
  ProtocolRun out;
  try {
    run_protocol_impl(net, protocol, out.frames);
  } catch (const SolverError& e) {
    out.completed = false;
    out.error = e.what();
  }
  return out;
}

StiffnessProfile compute_stiffness_profile(const ElementNetwork& net,
                                           const std::vector<double>& angles_deg,
                                           const std::vector<Height>& heights, double depth_mm) {
  StiffnessProfile out;
  out.angles_deg = angles_deg;
  out.heights = heights;
  out.k_n_per_mm.resize(static_cast<int>(angles_deg.size()), static_cast<int>(heights.size()));
  for (std::size_t ai = 0; ai < angles_deg.size(); ++ai) {
    for (std::size_t hi = 0; hi < heights.size(); ++hi) {
      ElementNetwork probe_net = net;
      probe_net.reset();
      probe_net.config().fps = 60.0;  // measurement rate, rate effects negligible at 3 mm/s
      LoadProtocol p;
      p.probe = ProbeKind::FlatProbe;
      p.angle_deg = angles_deg[ai];
      p.height = heights[hi];
      p.depth_mm = depth_mm;
      p.speed_mm_per_s = 3.0;
      const auto frames = run_protocol(probe_net, p);
      double peak_force = 0.0, peak_depth = 0.0;
      for (const auto& f : frames)
        if (f.probe_position_mm >= peak_depth) {
          peak_depth = f.probe_position_mm;
          peak_force = f.contact_force_n;
        }
      out.k_n_per_mm(static_cast<int>(ai), static_cast<int>(hi)) =
          peak_depth > 0.0 ? peak_force / peak_depth : 0.0;
    }
  }
  return out;
}

double compute_adaptive_factor(const std::vector<SimFrame>& frames,
                               const PolyhedralScaffold& scaffold, FaceId face,
                               double* l_prime_mm) {
  const auto& stations = scaffold.face_stations(face);
  const double length = scaffold.face_length(face);  // throws on degenerate faces
  if (frames.empty()) throw DomainError("compute_adaptive_factor: no frames");
  const auto arc = station_arclengths(scaffold, face);

  auto station_disp = [&](const SimFrame& f, std::size_t i) {
    const Vec3 cur = 0.5 * (f.node_positions[stations[i][0]] + f.node_positions[stations[i][1]]);
    const Vec3 rest = 0.5 * (scaffold.nodes[stations[i][0]] + scaffold.nodes[stations[i][1]]);
    return (cur - rest).norm();
  };

  // Frame of peak face displacement.
  std::size_t best_frame = 0;
  double best_disp = -1.0;
  for (std::size_t fi = 0; fi < frames.size(); ++fi) {
    double m = 0.0;
    for (std::size_t i = 0; i < stations.size(); ++i) m = std::max(m, station_disp(frames[fi], i));
    if (m > best_disp) {
      best_disp = m;
      best_frame = fi;
    }
  }
  const SimFrame& f = frames[best_frame];
  double d_max = 0.0, l_prime = 0.0;
  for (std::size_t i = 0; i < stations.size(); ++i) {
    const double d = station_disp(f, i);
    if (d > d_max) {
      d_max = d;
      l_prime = arc[i];
    }
  }
  const double d_tip = station_disp(f, stations.size() - 1);
  if (l_prime_mm) *l_prime_mm = l_prime;
  return (d_max - d_tip) / length;
}

std::vector<double> default_kappa_locations(const PolyhedralScaffold& s, FaceId face) {
  const double L = s.face_length(face);
  return {L / 6.0, L / 3.0, L / 2.0, L};
}

AdaptiveProfile measure_adaptive_profile(const ElementNetwork& net, FaceId face,
                                         const std::vector<double>& locations_mm, double force_n) {
  AdaptiveProfile out;
  out.face = face;
  out.locations_mm = locations_mm;
  out.face_length_mm = net.scaffold().face_length(face);
  for (double loc : locations_mm) {
    ElementNetwork n = net;
    n.reset();
    n.config().fps = 60.0;
    LoadProtocol p;
    p.probe = ProbeKind::PointForce;
    p.face = face;
    p.location_mm = loc;
    p.force_n = force_n;
    p.hold_s = 1.0;
    const auto frames = run_protocol(n, p);
    double l_prime = 0.0;
    out.kappa.push_back(compute_adaptive_factor(frames, n.scaffold(), face, &l_prime));
    out.l_prime_mm.push_back(l_prime);
  }
  return out;
}

}  // namespace softnet
