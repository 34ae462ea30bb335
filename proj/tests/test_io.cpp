#include <cstdio>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "softnet/io.hpp"
#include "softnet/rng.hpp"

using namespace softnet;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path dir;
  TempDir() {
    dir = fs::temp_directory_path() / ("softnet_io_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("atomic text write round trip") {
  TempDir tmp;
  const std::string p = tmp.path("note.txt");
  write_text_atomic(p, "hello\nworld\n");
  CHECK(read_text(p) == "hello\nworld\n");
  CHECK_THROWS(read_text(tmp.path("missing.txt")));
}

TEST_CASE("curve CSV round trip preserves samples and enforces the schema") {
  TempDir tmp;
  CurveSamples s;
  s.mode = PronyMode::Relaxation;
  for (int i = 0; i < 40; ++i) {
    s.times.push_back(0.01 * std::pow(10.0, i / 12.0));
    s.values.push_back(eval_relaxation_modulus(default_relaxation_series(), s.times.back()));
  }
  const std::string p = tmp.path("curve.csv");
  write_curve_csv(p, s);
  const CurveSamples back = read_curve_csv(p, PronyMode::Relaxation);
  REQUIRE(back.times.size() == s.times.size());
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    CHECK(back.times[i] == doctest::Approx(s.times[i]).epsilon(1e-12));
    CHECK(back.values[i] == doctest::Approx(s.values[i]).epsilon(1e-12));
  }
  // Unknown schema major is rejected.
  const std::string bad = tmp.path("bad.csv");
  write_text_atomic(bad, "# schema=99\nt_s,value\n0.0,1.0\n");
  CHECK_THROWS_AS(read_curve_csv(bad, PronyMode::Relaxation), ConfigError);
}

TEST_CASE("dataset CSV round trip") {
  TempDir tmp;
  Rng rng(4);
  std::vector<DatasetRecord> recs;
  for (int i = 0; i < 25; ++i) {
    DatasetRecord r;
    r.timestamp_s = 0.003 * i;
    for (int j = 0; j < 6; ++j) {
      r.pose[j] = rng.uniform(-3, 3);
      r.rate[j] = rng.uniform(-1, 1);
      r.accel[j] = rng.uniform(-1, 1);
      r.wrench[j] = rng.uniform(-0.4, 0.4);
    }
    r.probe_position_mm = rng.uniform(0, 8);
    r.warmup = (i < 3);
    if (i % 2 == 0) {
      r.nodes = VecX(78);
      for (int j = 0; j < 78; ++j) r.nodes[j] = rng.uniform(-30, 60);
    }
    recs.push_back(r);
  }
  const std::string p = tmp.path("data.csv");
  write_dataset_csv(p, recs);
  const auto back = read_dataset_csv(p);
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK((back[i].pose - recs[i].pose).norm() <= 1e-9);
    CHECK((back[i].wrench - recs[i].wrench).norm() <= 1e-9);
    CHECK(back[i].warmup == recs[i].warmup);
    CHECK(back[i].nodes.size() == recs[i].nodes.size());
  }
}

TEST_CASE("polyline CSV round trip") {
  TempDir tmp;
  const std::vector<Vec2> pts = {{0.0, 1.5}, {2.25, -3.0}, {10.0, 10.0}};
  const std::string p = tmp.path("poly.csv");
  write_polyline_csv(p, pts);
  const auto back = read_polyline_csv(p);
  REQUIRE(back.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK((back[i] - pts[i]).norm() <= 1e-12);
}

TEST_CASE("prony JSON round trip") {
  TempDir tmp;
  FitResult fit;
  fit.series = default_relaxation_series();
  fit.residual_rms = 1.25e-4;
  fit.iterations = 17;
  fit.converged = true;
  const std::string p = tmp.path("prony.json");
  save_prony(p, fit);
  const PronySeries back = load_prony(p);
  CHECK(back.mode == PronyMode::Relaxation);
  CHECK(back.instantaneous() == doctest::Approx(1.42).epsilon(1e-12));
  CHECK(back.equilibrium() == doctest::Approx(1.03).epsilon(1e-12));
}

TEST_CASE("regressor JSON round trip preserves predictions byte-for-byte") {
  TempDir tmp;
  Rng rng(6);
  Dataset d;
  for (int i = 0; i < 60; ++i) {
    DatasetRecord r;
    for (int j = 0; j < 6; ++j) {
      r.pose[j] = rng.uniform(-3, 3);
      r.rate[j] = rng.uniform(-1, 1);
      r.wrench[j] = 0.3 * r.pose[j];
    }
    (i % 3 == 2 ? d.test : d.train).push_back(r);
  }
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.seed = 5;
  const Regressor reg = train_wrench(d, FeatureSet::PoseRate, cfg);
  const std::string p = tmp.path("model.json");
  save_regressor(p, reg);
  const Regressor back = load_regressor(p);
  for (const auto& r : d.test) CHECK((back.predict(r) - reg.predict(r)).norm() <= 1e-12);
  // Saving twice is byte-identical (reproducibility contract).
  const std::string p2 = tmp.path("model2.json");
  save_regressor(p2, reg);
  CHECK(read_text(p) == read_text(p2));
}

TEST_CASE("metrics JSON is parseable and carries the channels") {
  EvalMetrics m;
  m.mae << 0.1, 0.2, 0.3, 0.01, 0.02, 0.003;
  m.samples = 42;
  const std::string j = metrics_to_json(m);
  CHECK(j.find("mae") != std::string::npos);
  CHECK(j.find("42") != std::string::npos);
}

TEST_CASE("run config parsing: defaults, overrides, and errors") {
  const std::string text = R"({
    "schema_major": 1,
    "seed": 7,
    "scaffold": {"height_mm": 60.0, "tip_forward_mm": 24.0},
    "network": {"stay_scale": 4.8, "cross_stay_scale": 1.2, "fps": 120.0,
                "brace_scale": 0.46, "secondary_brace_scale": 2.174},
    "camera": {"width": 1280, "height": 720},
    "train": {"epochs": 10, "feature_set": "pose_rate_accel"}
  })";
  const RunConfig c = RunConfig::from_json_text(text);
  CHECK(c.seed == 7);
  CHECK(c.network.stay_scale == doctest::Approx(4.8));
  CHECK(c.network.cross_stay_scale == doctest::Approx(1.2));
  CHECK(c.network.fps == doctest::Approx(120.0));
  CHECK(c.camera.width == 1280);
  CHECK(c.train.epochs == 10);
  CHECK(c.feature_set == FeatureSet::PoseRateAccel);
  CHECK(c.scaffold.tip_forward_mm == doctest::Approx(24.0));

  CHECK_THROWS_AS(RunConfig::from_json_text("{not json"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json_text(R"({"schema_major": 99})"), ConfigError);
}

TEST_CASE("config hash is stable and sensitive to bytes") {
  const std::string a = "{\"seed\": 1}";
  CHECK(fnv1a(a) == fnv1a(a));
  CHECK(fnv1a(a) != fnv1a("{\"seed\": 2}"));
}

TEST_CASE("manifest save lists files and parses back as JSON") {
  TempDir tmp;
  RunManifest m;
  m.config_hash = "deadbeef";
  // Manifest saving verifies that every listed artifact exists.
  const std::string artifact = tmp.path("a.csv");
  write_text_atomic(artifact, "# schema=1\nx_mm,y_mm\n");
  m.add_file(artifact);
  m.timings_s["simulate"] = 1.5;
  const std::string p = tmp.path("manifest.json");
  m.save(p);
  const std::string text = read_text(p);
  CHECK(text.find("deadbeef") != std::string::npos);
  CHECK(text.find("a.csv") != std::string::npos);
}

TEST_CASE("feature set names round trip") {
  CHECK(feature_set_from_string("pose") == FeatureSet::Pose);
  CHECK(feature_set_from_string("pose_rate") == FeatureSet::PoseRate);
  CHECK(feature_set_from_string("pose_rate_accel") == FeatureSet::PoseRateAccel);
  CHECK(to_string(FeatureSet::PoseRate) == "pose_rate");
  CHECK_THROWS_AS(feature_set_from_string("bogus"), ConfigError);
}
