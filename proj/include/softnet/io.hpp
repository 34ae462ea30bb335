#pragma once

#include <map>
#include <string>
#include <vector>

#include "softnet/camera.hpp"
#include "softnet/contour.hpp"
#include "softnet/dataset.hpp"
#include "softnet/grasp.hpp"
#include "softnet/metrics.hpp"
#include "softnet/mlp.hpp"
#include "softnet/prony.hpp"

namespace softnet {

inline constexpr int kSchemaMajor = 1;
inline constexpr const char* kToolkitVersion = "1.0.0";

// All writes go through a temp file + rename.
void write_text_atomic(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

// --- CSV ------------------------------------------------------------
// Every file starts with `# schema=<major>` followed by a header row.

void write_curve_csv(const std::string& path, const CurveSamples& samples);
CurveSamples read_curve_csv(const std::string& path, PronyMode mode);

void write_frames_csv(const std::string& path, const std::vector<SimFrame>& frames);

void write_grasp_csv(const std::string& path, const GraspTimeline& timeline);

void write_polyline_csv(const std::string& path, const std::vector<Vec2>& points);
std::vector<Vec2> read_polyline_csv(const std::string& path);

void write_dataset_csv(const std::string& path, const std::vector<DatasetRecord>& records);
std::vector<DatasetRecord> read_dataset_csv(const std::string& path);

// --- JSON models ------------------------------------------------------

void save_prony(const std::string& path, const FitResult& fit);
PronySeries load_prony(const std::string& path);

void save_regressor(const std::string& path, const Regressor& reg);
Regressor load_regressor(const std::string& path);

std::string metrics_to_json(const EvalMetrics& m);
void save_metrics(const std::string& path, const std::map<std::string, EvalMetrics>& table);

FeatureSet feature_set_from_string(const std::string& s);
std::string to_string(FeatureSet fs);

// --- Run configuration -------------------------------------------------

struct RunConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  ScaffoldSpec scaffold;
  NetworkConfig network;
  CameraModel camera;
  std::vector<LoadProtocol> protocols;
  TrainConfig train;
  FeatureSet feature_set = FeatureSet::PoseRate;
  DatasetOptions dataset;
  int dataset_protocols = 8;
  GraspScenario grasp;
  double contour_radius_mm = 50.0;

  std::string raw_text;  // bytes the config hash is computed over

  // Parses a JSON config file; unknown major schema versions and bad
  // keys raise ConfigError naming the offending key.
  static RunConfig load(const std::string& path);
  static RunConfig from_json_text(const std::string& text);
};

std::uint64_t fnv1a(const std::string& bytes);

struct RunManifest {
  std::string config_hash;
  std::string version = kToolkitVersion;
  std::vector<std::string> files;
  std::map<std::string, double> timings_s;
  std::map<std::string, std::string> notes;

  void add_file(const std::string& path) { files.push_back(path); }
  void save(const std::string& path) const;
};

}  // namespace softnet
