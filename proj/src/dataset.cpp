#include "softnet/dataset.hpp"

#include <cmath>

#include "softnet/rng.hpp"

namespace softnet {

void Dataset::validate() const {
  const Vec6 maxima = label_maxima();
  const auto check = [&](const std::vector<DatasetRecord>& recs, const char* split) {
    for (const auto& r : recs) {
      if (!r.pose.allFinite() || !r.rate.allFinite() || !r.accel.allFinite() ||
          !r.wrench.allFinite() || (r.nodes.size() && !r.nodes.allFinite()))
        throw DomainError(std::string("dataset: non-finite value in ") + split);
      for (int c = 0; c < 6; ++c)
        if (std::abs(r.wrench[c]) > maxima[c])
          throw DomainError(std::string("dataset: label out of range in ") + split);
    }
  };
  check(train, "train");
  check(test, "test");
}

int feature_dim(FeatureSet fs) {
  switch (fs) {
    case FeatureSet::Pose:
      return 6;
    case FeatureSet::PoseRate:
      return 12;
    case FeatureSet::PoseRateAccel:
      return 18;
  }
  throw DomainError("unknown feature set");
}

VecX make_features(const DatasetRecord& r, FeatureSet fs) {
  VecX f(feature_dim(fs));
  f.head<6>() = r.pose;
  if (fs != FeatureSet::Pose) f.segment<6>(6) = r.rate;
  if (fs == FeatureSet::PoseRateAccel) f.tail<6>() = r.accel;
  return f;
}

Dataset gen_dataset(const ElementNetwork& net, const std::vector<LoadProtocol>& protocols,
                    const CameraModel& cam, std::uint64_t seed, const DatasetOptions& opts) {
  if (protocols.empty()) throw ConfigError("gen_dataset: no protocols");
  cam.validate();
  Dataset out;
  const MarkerSpec marker;

  for (std::size_t pi = 0; pi < protocols.size(); ++pi) {
    ElementNetwork sim = net;
    sim.reset();
    const std::vector<SimFrame> frames = run_protocol(sim, protocols[pi]);

    // Marker frame: world-aligned axes at the plate rest centroid. The
    // camera sits at opts.camera_offset_mm with world-aligned axes looking
    // +z, so relative pose components match world displacements.
    Vec3 rest_centroid = Vec3::Zero();
    for (int n : net.scaffold().marker_plate_nodes) rest_centroid += net.scaffold().nodes[n];
    rest_centroid /= static_cast<double>(net.scaffold().marker_plate_nodes.size());

    Rng noise(seed + 7919 * pi);
    MarkerSession session(cam, marker);
    std::vector<double> times;
    std::vector<Vec6> poses;
    times.reserve(frames.size());
    poses.reserve(frames.size());
    for (const SimFrame& f : frames) {
      times.push_back(f.time);
      if (!opts.use_vision) {
        poses.push_back(f.marker_pose_true);
        continue;
      }
      const Vec6& d = f.marker_pose_true;
      RigidTransform cam_marker;
      cam_marker.rotation = euler_xyz_deg_to_matrix(d.tail<3>());
      cam_marker.translation = rest_centroid + d.head<3>() - opts.camera_offset_mm;
      const Corners px = project_marker(cam, marker, cam_marker, &noise);
      poses.push_back(session.observe(px));
    }

    // Snap the feature window to a whole number of frames: the nominal
    // 15 ms window is "five frames" at 330 fps, which is 15.15 ms exactly.
    const double period = times.size() > 1 ? times[1] - times[0] : opts.feature_delta_t_s;
    const double snapped_dt =
        std::max(1.0, std::round(opts.feature_delta_t_s / period)) * period;
    const std::vector<MotionFeatures> feats = compute_motion_features(times, poses, snapped_dt);

    std::vector<DatasetRecord>& split = (pi % 2 == 0) ? out.train : out.test;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      DatasetRecord r;
      r.timestamp_s = frames[i].time + 10000.0 * static_cast<double>(pi);
      r.pose = feats[i].pose;
      r.rate = feats[i].rate;
      r.accel = feats[i].accel;
      r.warmup = feats[i].warmup;
      r.wrench = frames[i].reaction_wrench.as_vec();
      r.probe_position_mm = frames[i].probe_position_mm;
      if (opts.with_nodes) {
        r.nodes = VecX(3 * frames[i].node_positions.size());
        for (std::size_t n = 0; n < frames[i].node_positions.size(); ++n)
          r.nodes.segment<3>(3 * n) = frames[i].node_positions[n];
      }
      split.push_back(std::move(r));
    }
  }
  if (out.test.empty()) {
    // Single-protocol fallback: tail of the run becomes the test split.
    const std::size_t cut =
        static_cast<std::size_t>(out.train.size() * opts.train_fraction);
    out.test.assign(out.train.begin() + cut, out.train.end());
    out.train.resize(cut);
  }
  return out;
}

std::vector<LoadProtocol> default_wrench_protocols(int count, std::uint64_t seed) {
  if (count < 1) throw ConfigError("default_wrench_protocols: count must be positive");
  Rng rng(seed);
  std::vector<LoadProtocol> out;
  const Height heights[] = {Height::H2, Height::H3};
  for (int i = 0; i < count; ++i) {
    LoadProtocol p;
    p.probe = ProbeKind::FlatProbe;
    // Draw angle/height from the rng rather than cycling on the index:
    // protocols alternate into train/test by parity, and an index-driven
    // pattern would segregate the conditions between the splits.
    p.angle_deg = (rng.integer(2) == 0) ? 0.0 : 90.0;
    p.height = heights[rng.integer(2)];
    // Cap at 8 mm: deeper apex-band pokes can lose quasi-static equilibrium.
    p.depth_mm = rng.uniform(4.0, 8.0);
    p.speed_mm_per_s = rng.uniform(2.0, 20.0);
    p.hold_s = (i % 3 == 0) ? rng.uniform(0.2, 1.0) : 0.0;
    p.cycles = 1 + static_cast<int>(rng.integer(2));
    p.wait_between_s = 0.1;
    out.push_back(p);
  }
  return out;
}

std::vector<LoadProtocol> default_kinesthesia_protocols(int count, std::uint64_t seed) {
  if (count < 1) throw ConfigError("default_kinesthesia_protocols: count must be positive");
  Rng rng(seed);
  std::vector<LoadProtocol> out;
  const Height heights[] = {Height::H1, Height::H2, Height::H3, Height::H4};
  for (int i = 0; i < count; ++i) {
    LoadProtocol p;
    p.probe = ProbeKind::FlatProbe;
    // Randomized for the same reason as the wrench set: the parity-based
    // train/test split must see every angle/height condition on both sides.
    p.angle_deg = (rng.integer(2) == 0) ? 0.0 : 90.0;
    p.height = heights[rng.integer(4)];
    p.depth_mm = rng.uniform(3.0, 8.0);
    p.speed_mm_per_s = rng.uniform(2.0, 12.0);
    p.cycles = 1;
    out.push_back(p);
  }
  return out;
}

}  // namespace softnet
