#include "softnet/network.hpp"

#include <cmath>

namespace softnet {

namespace {
constexpr double kTorqueScale = 1e-3;  // N*mm -> Nm
}

ElementNetwork::ElementNetwork(const PolyhedralScaffold& scaffold, const NetworkConfig& cfg)
    : scaffold_(scaffold), cfg_(cfg) {
  if (!cfg_.band_scales.empty() &&
      cfg_.band_scales.size() != static_cast<std::size_t>(scaffold_.band_count))
    throw ConfigError("NetworkConfig: band_scales size mismatch");
  if (scaffold_.base_nodes.empty()) throw ConfigError("scaffold has no fixed base nodes");
  if (!scaffold_.connected()) throw ConfigError("scaffold edge graph is not connected");

  rest_positions_ = scaffold_.nodes;
  positions_ = rest_positions_;
  fixed_.assign(rest_positions_.size(), false);
  for (int n : scaffold_.base_nodes) fixed_[n] = true;
  free_index_.assign(rest_positions_.size(), -1);
  for (std::size_t i = 0; i < rest_positions_.size(); ++i)
    if (!fixed_[i]) free_index_[i] = n_free_++;

  std::vector<bool> on_plate(rest_positions_.size(), false);
  for (int n : scaffold_.marker_plate_nodes) on_plate[n] = true;

  for (std::size_t e = 0; e < scaffold_.edges.size(); ++e) {
    Element el;
    el.a = scaffold_.edges[e][0];
    el.b = scaffold_.edges[e][1];
    el.rest_length = (rest_positions_[el.b] - rest_positions_[el.a]).norm();
    if (el.rest_length <= 0.0) throw GeometryError("zero-length edge in scaffold");
    if (on_plate[el.a] && on_plate[el.b]) {
      // The marker plate is a rigid part; its ring edges get the stiff
      // elastic plate model instead of the soft viscoelastic one.
      el.model.mode = PronyMode::Relaxation;
      el.model.base = cfg_.plate_axial_n;
      el.model.branch_coeffs.clear();
      el.model.branch_times.clear();
    } else if (scaffold_.stay_edge[e]) {
      // Back stays: section set independently of the band table.
      el.model = cfg_.material.scaled(cfg_.stay_scale * cfg_.reference_length_mm);
    } else if (scaffold_.cross_stay_edge[e]) {
      el.model = cfg_.material.scaled(cfg_.cross_stay_scale * cfg_.reference_length_mm);
    } else if (scaffold_.brace_edge[e]) {
      // Slender face diagonals: same viscoelastic material, optionally with
      // a reduced section and a stiffer secondary (left) face.
      el.tension_only = cfg_.brace_tension_only;
      double scale = cfg_.band_scale(scaffold_.edge_band[e]) * cfg_.brace_scale;
      if (scaffold_.edge_face[e] == 3) scale *= cfg_.secondary_brace_scale;
      el.model = cfg_.material.scaled(scale * cfg_.reference_length_mm);
    } else {
      // Axial force per unit strain: material * band_scale * ref_len, so the
      // axial stiffness in N/mm scales with 1/rest_length (uniform section).
      el.model = cfg_.material.scaled(cfg_.band_scale(scaffold_.edge_band[e]) *
                                      cfg_.reference_length_mm);
    }
    el.state = ViscoState::rest(el.model);
    elements_.push_back(el);
  }
  // Marker-plate diagonals: stiff, purely elastic.
  for (const auto& st : scaffold_.stiffeners) {
    Element el;
    el.a = st[0];
    el.b = st[1];
    el.rest_length = (rest_positions_[el.b] - rest_positions_[el.a]).norm();
    el.model.mode = PronyMode::Relaxation;
    el.model.base = cfg_.plate_axial_n;
    el.model.branch_coeffs.clear();
    el.model.branch_times.clear();
    el.state = ViscoState::rest(el.model);
    elements_.push_back(el);
  }
  for (std::size_t t = 0; t < scaffold_.bend_triples.size(); ++t) {
    Bend bend;
    bend.a = scaffold_.bend_triples[t][0];
    bend.b = scaffold_.bend_triples[t][1];
    bend.c = scaffold_.bend_triples[t][2];
    bend.stiffness =
        (scaffold_.bend_at_flexure[t] ? cfg_.bend_flexure_n_per_mm : cfg_.bend_beam_n_per_mm) *
        cfg_.bend_band_scale(scaffold_.bend_band[t]);
    bends_.push_back(bend);
  }
}

void ElementNetwork::reset() {
  positions_ = rest_positions_;
  for (auto& el : elements_) el.state = ViscoState::rest(el.model);
  time_ = 0.0;
  prev_load_ = Load{};
  prev_external_.clear();
  pending_work_ = 0.0;
}

void ElementNetwork::rotate_body(const Mat3& r) {
  for (auto& p : rest_positions_) p = r * p;
  for (auto& p : positions_) p = r * p;
  for (auto& p : scaffold_.nodes) p = r * p;
}

void ElementNetwork::internal_forces(double dt, std::vector<Vec3>& f, MatX* jac) const {
  for (const auto& el : elements_) {
    const Vec3 d = positions_[el.b] - positions_[el.a];
    const double len = d.norm();
    if (len < 1e-9) throw GeometryError("element collapsed to zero length");
    const Vec3 u = d / len;
    const double strain = (len - el.rest_length) / el.rest_length;
    double tangent = step_visco_tangent(el.model, dt);
    double sigma = tangent * strain + step_visco_offset(el.model, el.state, dt);
    if (el.tension_only && sigma <= 0.0) {
      sigma = 0.0;
      tangent = 0.0;
    }
    // Positive sigma = tension, pulling a toward b.
    f[el.a] += sigma * u;
    f[el.b] -= sigma * u;
    if (jac) {
      const Mat3 k = (tangent / el.rest_length) * (u * u.transpose()) +
                     (sigma / len) * (Mat3::Identity() - u * u.transpose());
      const int ia = free_index_[el.a], ib = free_index_[el.b];
      if (ia >= 0) jac->block<3, 3>(3 * ia, 3 * ia) -= k;
      if (ib >= 0) jac->block<3, 3>(3 * ib, 3 * ib) -= k;
      if (ia >= 0 && ib >= 0) {
        jac->block<3, 3>(3 * ia, 3 * ib) += k;
        jac->block<3, 3>(3 * ib, 3 * ia) += k;
      }
    }
  }
  for (const auto& bend : bends_) {
    const Vec3 lap = positions_[bend.a] - 2.0 * positions_[bend.b] + positions_[bend.c];
    f[bend.a] -= bend.stiffness * lap;
    f[bend.b] += 2.0 * bend.stiffness * lap;
    f[bend.c] -= bend.stiffness * lap;
    if (jac) {
      const int idx[3] = {free_index_[bend.a], free_index_[bend.b], free_index_[bend.c]};
      const double w[3] = {1.0, -2.0, 1.0};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          if (idx[i] >= 0 && idx[j] >= 0)
            jac->block<3, 3>(3 * idx[i], 3 * idx[j]) -=
                bend.stiffness * w[i] * w[j] * Mat3::Identity();
    }
  }
}

void ElementNetwork::external_forces(const Load& load, double /*dt*/, std::vector<Vec3>& f,
                                     MatX* jac) const {
  for (const auto& [node, force] : load.node_forces) f[node] += force;
  const double kc = cfg_.contact_penalty_n_per_mm;
  if (load.plane) {
    const auto& p = *load.plane;
    for (std::size_t i = 0; i < positions_.size(); ++i) {
      if (fixed_[i]) continue;
      // Smooth taper at the probe's top/bottom edges: a node sliding past
      // the band boundary sheds contact gradually (1 mm ramp), otherwise
      // the force discontinuity defeats the Newton solve.
      const double over = std::abs(positions_[i][2] - p.band_center_z) - p.band_half_mm;
      const double w = std::clamp(1.0 - over / 1.0, 0.0, 1.0);
      if (w <= 0.0) continue;
      const double pen = p.offset_mm - p.normal.dot(positions_[i]);
      if (pen <= 0.0) continue;
      f[i] += w * kc * pen * p.normal;
      if (cfg_.contact_mu > 0.0) {
        // Explicit Coulomb friction against the slip since the last
        // committed step; constant within the Newton solve.
        Vec3 slip =
            positions_[i] - (prev_positions_.empty() ? rest_positions_[i] : prev_positions_[i]);
        slip -= p.normal * p.normal.dot(slip);
        const double sn = slip.norm();
        if (sn > 1e-12) f[i] -= cfg_.contact_mu * w * kc * pen * slip / (sn + 1e-6);
      }
      if (jac) {
        const int ii = free_index_[i];
        if (ii >= 0)
          jac->block<3, 3>(3 * ii, 3 * ii) -= w * kc * (p.normal * p.normal.transpose());
      }
    }
  }
  if (load.cylinder) {
    const auto& cyl = *load.cylinder;
    for (std::size_t i = 0; i < positions_.size(); ++i) {
      if (fixed_[i]) continue;
      Vec3 v = positions_[i] - cyl.axis_point;
      v -= cyl.axis_dir * cyl.axis_dir.dot(v);
      const double dist = v.norm();
      if (dist < 1e-9) continue;
      const double pen = cyl.radius_mm - dist;
      if (pen <= 0.0) continue;
      const Vec3 n = v / dist;
      f[i] += kc * pen * n;
      if (jac) {
        const int ii = free_index_[i];
        if (ii >= 0) jac->block<3, 3>(3 * ii, 3 * ii) -= kc * (n * n.transpose());
      }
    }
  }
}

bool ElementNetwork::newton_solve(const Load& load, double dt) {
  const int dof = 3 * n_free_;
  std::vector<Vec3> f(positions_.size());
  MatX jac(dof, dof);

  auto residual = [&](VecX& r, MatX* j) {
    for (auto& v : f) v.setZero();
    if (j) j->setZero();
    internal_forces(dt, f, j);
    external_forces(load, dt, f, j);
    for (std::size_t i = 0; i < positions_.size(); ++i)
      if (free_index_[i] >= 0) r.segment<3>(3 * free_index_[i]) = f[i];
  };

  VecX r(dof);
  residual(r, nullptr);
  double rnorm = r.lpNorm<Eigen::Infinity>();
  if (rnorm < cfg_.solver_tol_n) return true;

  for (int it = 0; it < cfg_.newton_cap; ++it) {
    residual(r, &jac);
    rnorm = r.lpNorm<Eigen::Infinity>();
    if (rnorm < cfg_.solver_tol_n) return true;
    jac.diagonal().array() -= 1e-12;
    const VecX dx = jac.partialPivLu().solve(-r);
    if (!dx.allFinite()) return false;

    const std::vector<Vec3> saved = positions_;
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      for (std::size_t i = 0; i < positions_.size(); ++i)
        if (free_index_[i] >= 0)
          positions_[i] = saved[i] + step * dx.segment<3>(3 * free_index_[i]);
      try {
        residual(r, nullptr);
      } catch (const GeometryError&) {
        step *= 0.5;
        continue;
      }
      if (r.lpNorm<Eigen::Infinity>() < rnorm * (1.0 - 1e-4 * step) ||
          r.lpNorm<Eigen::Infinity>() < cfg_.solver_tol_n) {
        accepted = true;
        break;
      }
      step *= 0.5;
      if (step < 1e-12) break;
    }
    if (!accepted) {
      positions_ = saved;
      return false;
    }
  }
  residual(r, nullptr);
  return r.lpNorm<Eigen::Infinity>() < cfg_.solver_tol_n;
}

Load ElementNetwork::interpolate(const Load& a, const Load& b, double s) {
  Load out = b;
  for (auto& [node, force] : out.node_forces) {
    Vec3 f0 = Vec3::Zero();
    for (const auto& [n0, force0] : a.node_forces)
      if (n0 == node) f0 = force0;
    force = f0 + s * (force - f0);
  }
  if (b.plane) {
    out.plane = b.plane;
    if (a.plane) out.plane->offset_mm = a.plane->offset_mm + s * (b.plane->offset_mm - a.plane->offset_mm);
  }
  if (b.cylinder && a.cylinder) {
    out.cylinder->axis_point =
        a.cylinder->axis_point + s * (b.cylinder->axis_point - a.cylinder->axis_point);
  }
  return out;
}

SimFrame ElementNetwork::finish_step(const Load& load, double dt) {
  // Forces at the converged configuration, before the state commit (the
  // commit re-bases the affine stress onto the next step).
  std::vector<Vec3> f_int(positions_.size(), Vec3::Zero());
  internal_forces(dt, f_int, nullptr);
  std::vector<Vec3> f_ext(positions_.size(), Vec3::Zero());
  external_forces(load, dt, f_ext, nullptr);

  for (auto& el : elements_) {
    const double len = (positions_[el.b] - positions_[el.a]).norm();
    const double strain = (len - el.rest_length) / el.rest_length;
    step_visco_commit(el.model, el.state, strain, dt);
  }
  time_ += dt;

  SimFrame frame;
  frame.time = time_;
  for (int n : scaffold_.feature_nodes) frame.node_positions.push_back(positions_[n]);
  frame.marker_pose_true = marker_pose_true();

  Vec3 rf = Vec3::Zero(), rt = Vec3::Zero();
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    if (!fixed_[i]) continue;
    rf += f_int[i];
    rt += positions_[i].cross(f_int[i]);
  }
  frame.reaction_wrench.force = rf;
  frame.reaction_wrench.torque = rt * kTorqueScale;

  Vec3 contact = Vec3::Zero();
  {
    Load contact_only;
    contact_only.plane = load.plane;
    contact_only.cylinder = load.cylinder;
    std::vector<Vec3> fc(positions_.size(), Vec3::Zero());
    external_forces(contact_only, dt, fc, nullptr);
    for (const auto& v : fc) contact += v;
  }
  frame.contact_force_n = contact.norm();

  // Residual at the accepted configuration.
  double rmax = 0.0;
  for (std::size_t i = 0; i < positions_.size(); ++i)
    if (!fixed_[i]) rmax = std::max(rmax, (f_int[i] + f_ext[i]).lpNorm<Eigen::Infinity>());
  frame.residual_norm_n = rmax;

  // Trapezoidal external work over the step.
  if (prev_external_.empty()) prev_external_.assign(positions_.size(), Vec3::Zero());
  if (prev_positions_.empty()) prev_positions_ = rest_positions_;
  double work = 0.0;
  for (std::size_t i = 0; i < positions_.size(); ++i)
    work += 0.5 * (prev_external_[i] + f_ext[i]).dot(positions_[i] - prev_positions_[i]);
  pending_work_ += work;
  frame.external_work_nmm = pending_work_;

  prev_external_ = f_ext;
  prev_positions_ = positions_;
  prev_load_ = load;
  return frame;
}

bool ElementNetwork::solve_with_substep(const Load& load, double dt, int depth) {
  const std::vector<Vec3> saved = positions_;
  if (newton_solve(load, dt)) {
    last_frame_ = finish_step(load, dt);
    return true;
  }
  positions_ = saved;
  if (depth >= 6) return false;
  const Load start = prev_load_;
  const Load mid = interpolate(start, load, 0.5);
  if (!solve_with_substep(mid, dt * 0.5, depth + 1)) return false;
  return solve_with_substep(load, dt * 0.5, depth + 1);
}

SimFrame ElementNetwork::solve_quasistatic(const Load& load, double dt_s) {
  if (dt_s <= 0.0) throw DomainError("solve_quasistatic: dt must be > 0");
  pending_work_ = 0.0;
  if (!solve_with_substep(load, dt_s, 0)) {
    std::vector<Vec3> f(positions_.size(), Vec3::Zero());
    internal_forces(dt_s, f, nullptr);
    external_forces(load, dt_s, f, nullptr);
    double rmax = 0.0;
    for (std::size_t i = 0; i < positions_.size(); ++i)
      if (!fixed_[i]) rmax = std::max(rmax, f[i].lpNorm<Eigen::Infinity>());
    throw SolverError("quasi-static solve diverged", rmax);
  }
  SimFrame frame = last_frame_;
  frame.external_work_nmm = pending_work_;
  return frame;
}

RigidTransform ElementNetwork::marker_plate_transform() const {
  std::vector<Vec3> from, to;
  for (int n : scaffold_.marker_plate_nodes) {
    from.push_back(rest_positions_[n]);
    to.push_back(positions_[n]);
  }
  return rigid_fit(from, to);
}

Vec6 ElementNetwork::marker_pose_true() const {
  const RigidTransform t = marker_plate_transform();
  Vec6 d;
  d.head<3>() = t.translation;
  d.tail<3>() = matrix_to_euler_xyz_deg(t.rotation);
  return d;
}

}  // namespace softnet
