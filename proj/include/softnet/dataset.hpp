#pragma once

#include <vector>

#include "softnet/camera.hpp"
#include "softnet/common.hpp"
#include "softnet/protocol.hpp"

namespace softnet {

// One aligned sample: observed marker pose with kinetic features, the
// base reaction wrench label, and (optionally) the feature-node set.
struct DatasetRecord {
  double timestamp_s = 0.0;
  Vec6 pose = Vec6::Zero();   // D, mm / deg
  Vec6 rate = Vec6::Zero();   // D-dot
  Vec6 accel = Vec6::Zero();  // D-ddot
  Vec6 wrench = Vec6::Zero(); // N / Nm
  VecX nodes;                 // flattened feature points (3*26), may be empty
  double probe_position_mm = 0.0;
  bool warmup = false;
};

struct Dataset {
  std::vector<DatasetRecord> train;
  std::vector<DatasetRecord> test;

  // Label-space maxima used for range checks (Fx,Fy,Fz,Tx,Ty,Tz).
  static Vec6 label_maxima() {
    Vec6 m;
    m << 20.0, 20.0, 10.0, 2.0, 2.0, 0.5;
    return m;
  }
  void validate() const;  // no NaN, labels within maxima
};

enum class FeatureSet { Pose, PoseRate, PoseRateAccel };

int feature_dim(FeatureSet fs);
VecX make_features(const DatasetRecord& r, FeatureSet fs);

struct DatasetOptions {
  double feature_delta_t_s = 0.015;
  bool with_nodes = false;
  bool use_vision = true;  // observed pose via noisy projection + PnP
  double train_fraction = 0.5;
  Vec3 camera_offset_mm = Vec3(0.0, 0.0, -25.0);  // camera below the base
};

// Runs every protocol on a clone of the network, tracks the marker
// through the synthetic camera, and assembles aligned records.
// Deterministic under seed; protocols alternate into train/test splits
// with disjoint timestamp ranges.
Dataset gen_dataset(const ElementNetwork& net, const std::vector<LoadProtocol>& protocols,
                    const CameraModel& cam, std::uint64_t seed,
                    const DatasetOptions& opts = {});

// Default protocol sets used by the pipeline.
std::vector<LoadProtocol> default_wrench_protocols(int count, std::uint64_t seed);
std::vector<LoadProtocol> default_kinesthesia_protocols(int count, std::uint64_t seed);

}  // namespace softnet
