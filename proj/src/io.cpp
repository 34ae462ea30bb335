#include "softnet/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace softnet {

using nlohmann::json;

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open for writing: " + tmp.string());
    out << content;
    if (!out.good()) throw ConfigError("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string schema_line() { return "# schema=" + std::to_string(kSchemaMajor) + "\n"; }

// Returns remaining lines after validating the schema comment.
std::vector<std::string> read_csv_lines(const std::string& path, const std::string& header) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty file: " + path);
  if (line.rfind("# schema=", 0) != 0) throw ConfigError("missing schema line: " + path);
  const int major = std::stoi(line.substr(9));
  if (major != kSchemaMajor)
    throw ConfigError("unsupported schema major " + std::to_string(major) + " in " + path);
  if (!std::getline(in, line) || line != header)
    throw ConfigError("unexpected CSV header in " + path);
  std::vector<std::string> rows;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(line);
  return rows;
}

std::vector<double> split_numbers(const std::string& line, const std::string& path) {
  std::vector<double> out;
  std::istringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + tok + "' in " + path);
    }
  }
  return out;
}

char buf_fmt[64];
std::string num(double v) {
  // max_digits10 so every written double parses back bit-exact.
  std::snprintf(buf_fmt, sizeof(buf_fmt), "%.17g", v);
  return buf_fmt;
}

}  // namespace

void write_curve_csv(const std::string& path, const CurveSamples& samples) {
  samples.validate();
  std::ostringstream out;
  out << schema_line() << "t_s,value\n";
  for (std::size_t i = 0; i < samples.times.size(); ++i)
    out << num(samples.times[i]) << ',' << num(samples.values[i]) << '\n';
  write_text_atomic(path, out.str());
}

CurveSamples read_curve_csv(const std::string& path, PronyMode mode) {
  CurveSamples s;
  s.mode = mode;
  for (const auto& row : read_csv_lines(path, "t_s,value")) {
    const auto v = split_numbers(row, path);
    if (v.size() != 2) throw ConfigError("expected 2 columns in " + path);
    s.times.push_back(v[0]);
    s.values.push_back(v[1]);
  }
  s.validate();
  return s;
}

void write_frames_csv(const std::string& path, const std::vector<SimFrame>& frames) {
  std::ostringstream out;
  out << schema_line()
      << "t_s,Dx_mm,Dy_mm,Dz_mm,Drx_deg,Dry_deg,Drz_deg,"
         "Fx_N,Fy_N,Fz_N,Tx_Nm,Ty_Nm,Tz_Nm,contact_N,probe_mm\n";
  for (const auto& f : frames) {
    out << num(f.time);
    for (int i = 0; i < 6; ++i) out << ',' << num(f.marker_pose_true[i]);
    const Vec6 w = f.reaction_wrench.as_vec();
    for (int i = 0; i < 6; ++i) out << ',' << num(w[i]);
    out << ',' << num(f.contact_force_n) << ',' << num(f.probe_position_mm) << '\n';
  }
  write_text_atomic(path, out.str());
}

namespace {
const char* phase_name(GraspPhase p) {
  switch (p) {
    case GraspPhase::PreContact: return "pre-contact";
    case GraspPhase::Sliding: return "sliding";
    case GraspPhase::Lifted: return "lifted";
    case GraspPhase::Gripped: return "gripped";
    case GraspPhase::Slipping: return "slipping";
  }
  return "?";
}
}  // namespace

void write_grasp_csv(const std::string& path, const GraspTimeline& timeline) {
  std::ostringstream out;
  out << schema_line() << "t_s,Fg,Fs,Fg_prime,mu_hat,phase\n";
  for (const auto& s : timeline.states)
    out << num(s.t_s) << ',' << num(s.fg_n) << ',' << num(s.fs_n) << ',' << num(s.fg_prime_n)
        << ',' << num(s.mu_hat) << ',' << phase_name(s.phase) << '\n';
  write_text_atomic(path, out.str());
}

void write_polyline_csv(const std::string& path, const std::vector<Vec2>& points) {
  std::ostringstream out;
  out << schema_line() << "x_mm,y_mm\n";
  for (const auto& p : points) out << num(p.x()) << ',' << num(p.y()) << '\n';
  write_text_atomic(path, out.str());
}

std::vector<Vec2> read_polyline_csv(const std::string& path) {
  std::vector<Vec2> out;
  for (const auto& row : read_csv_lines(path, "x_mm,y_mm")) {
    const auto v = split_numbers(row, path);
    if (v.size() != 2) throw ConfigError("expected 2 columns in " + path);
    out.emplace_back(v[0], v[1]);
  }
  return out;
}

void write_dataset_csv(const std::string& path, const std::vector<DatasetRecord>& records) {
  std::ostringstream out;
  out << schema_line()
      << "t_s,Dx,Dy,Dz,Drx,Dry,Drz,Vx,Vy,Vz,Vrx,Vry,Vrz,Ax,Ay,Az,Arx,Ary,Arz,"
         "Fx,Fy,Fz,Tx,Ty,Tz,probe_mm,warmup,nodes\n";
  for (const auto& r : records) {
    out << num(r.timestamp_s);
    for (int i = 0; i < 6; ++i) out << ',' << num(r.pose[i]);
    for (int i = 0; i < 6; ++i) out << ',' << num(r.rate[i]);
    for (int i = 0; i < 6; ++i) out << ',' << num(r.accel[i]);
    for (int i = 0; i < 6; ++i) out << ',' << num(r.wrench[i]);
    out << ',' << num(r.probe_position_mm) << ',' << (r.warmup ? 1 : 0) << ','
        << r.nodes.size();
    for (int i = 0; i < r.nodes.size(); ++i) out << ',' << num(r.nodes[i]);
    out << '\n';
  }
  write_text_atomic(path, out.str());
}

std::vector<DatasetRecord> read_dataset_csv(const std::string& path) {
  std::vector<DatasetRecord> out;
  const std::string header =
      "t_s,Dx,Dy,Dz,Drx,Dry,Drz,Vx,Vy,Vz,Vrx,Vry,Vrz,Ax,Ay,Az,Arx,Ary,Arz,"
      "Fx,Fy,Fz,Tx,Ty,Tz,probe_mm,warmup,nodes";
  for (const auto& row : read_csv_lines(path, header)) {
    const auto v = split_numbers(row, path);
    if (v.size() < 27) throw ConfigError("short dataset row in " + path);
    DatasetRecord r;
    r.timestamp_s = v[0];
    for (int i = 0; i < 6; ++i) r.pose[i] = v[1 + i];
    for (int i = 0; i < 6; ++i) r.rate[i] = v[7 + i];
    for (int i = 0; i < 6; ++i) r.accel[i] = v[13 + i];
    for (int i = 0; i < 6; ++i) r.wrench[i] = v[19 + i];
    r.probe_position_mm = v[25];
    r.warmup = v[26] != 0.0;
    const int n_nodes = static_cast<int>(v[27]);
    if (static_cast<int>(v.size()) != 28 + n_nodes)
      throw ConfigError("dataset row node-count mismatch in " + path);
    r.nodes.resize(n_nodes);
    for (int i = 0; i < n_nodes; ++i) r.nodes[i] = v[28 + i];
    out.push_back(std::move(r));
  }
  return out;
}

// --- JSON models ---------------------------------------------------------

namespace {

json prony_to_json(const PronySeries& p) {
  return json{{"mode", to_string(p.mode)},
              {"base", p.base},
              {"branch_coeffs", p.branch_coeffs},
              {"branch_times", p.branch_times}};
}

PronySeries prony_from_json(const json& j) {
  PronySeries p;
  p.mode = prony_mode_from_string(j.at("mode").get<std::string>());
  p.base = j.at("base").get<double>();
  p.branch_coeffs = j.at("branch_coeffs").get<std::vector<double>>();
  p.branch_times = j.at("branch_times").get<std::vector<double>>();
  p.validate();
  return p;
}

json matrix_to_json(const MatX& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatX matrix_from_json(const json& j) {
  MatX m(j.size(), j.empty() ? 0 : j.at(0).size());
  for (int i = 0; i < m.rows(); ++i)
    for (int c = 0; c < m.cols(); ++c) m(i, c) = j.at(i).at(c).get<double>();
  return m;
}

json vector_to_json(const VecX& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

VecX vector_from_json(const json& j) {
  VecX v(j.size());
  for (int i = 0; i < v.size(); ++i) v[i] = j.at(i).get<double>();
  return v;
}

void check_schema(const json& j, const std::string& path) {
  const int major = j.at("schema_major").get<int>();
  if (major != kSchemaMajor)
    throw ConfigError("unsupported schema major " + std::to_string(major) + " in " + path);
}

}  // namespace

void save_prony(const std::string& path, const FitResult& fit) {
  json j{{"schema_major", kSchemaMajor},
         {"series", prony_to_json(fit.series)},
         {"residual_rms", fit.residual_rms},
         {"iterations", fit.iterations},
         {"converged", fit.converged}};
  write_text_atomic(path, j.dump(2) + "\n");
}

PronySeries load_prony(const std::string& path) {
  const json j = json::parse(read_text(path));
  check_schema(j, path);
  return prony_from_json(j.at("series"));
}

void save_regressor(const std::string& path, const Regressor& reg) {
  json layers = json::array();
  for (std::size_t l = 0; l < reg.model.weights.size(); ++l)
    layers.push_back(json{{"w", matrix_to_json(reg.model.weights[l])},
                          {"b", vector_to_json(reg.model.biases[l])}});
  json j{{"schema_major", kSchemaMajor},
         {"layer_sizes", reg.model.layer_sizes},
         {"activation", reg.model.activation},
         {"layers", layers},
         {"feature_set", to_string(reg.feature_set)},
         {"normalizer",
          json{{"in_min", vector_to_json(reg.normalizer.in_min)},
               {"in_max", vector_to_json(reg.normalizer.in_max)},
               {"out_min", vector_to_json(reg.normalizer.out_min)},
               {"out_max", vector_to_json(reg.normalizer.out_max)}}},
         {"train_log",
          json{{"train_mse", reg.log.train_mse},
               {"test_mse", reg.log.test_mse},
               {"best_epoch", reg.log.best_epoch}}}};
  write_text_atomic(path, j.dump(2) + "\n");
}

Regressor load_regressor(const std::string& path) {
  const json j = json::parse(read_text(path));
  check_schema(j, path);
  Regressor reg;
  reg.model.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  reg.model.activation = j.at("activation").get<std::string>();
  for (const json& layer : j.at("layers")) {
    reg.model.weights.push_back(matrix_from_json(layer.at("w")));
    reg.model.biases.push_back(vector_from_json(layer.at("b")));
  }
  reg.feature_set = feature_set_from_string(j.at("feature_set").get<std::string>());
  const json& n = j.at("normalizer");
  reg.normalizer.in_min = vector_from_json(n.at("in_min"));
  reg.normalizer.in_max = vector_from_json(n.at("in_max"));
  reg.normalizer.out_min = vector_from_json(n.at("out_min"));
  reg.normalizer.out_max = vector_from_json(n.at("out_max"));
  if (j.contains("train_log")) {
    reg.log.train_mse = j.at("train_log").at("train_mse").get<std::vector<double>>();
    reg.log.test_mse = j.at("train_log").at("test_mse").get<std::vector<double>>();
    reg.log.best_epoch = j.at("train_log").at("best_epoch").get<int>();
  }
  return reg;
}

namespace {
json metrics_json(const EvalMetrics& m) {
  return json{{"mae", std::vector<double>(m.mae.data(), m.mae.data() + 6)},
              {"r2", std::vector<double>(m.r2.data(), m.r2.data() + 6)},
              {"magnitude_mae_n", m.magnitude_mae_n},
              {"direction_mae_deg", m.direction_mae_deg},
              {"hysteresis_area_true", m.hysteresis_area_true},
              {"hysteresis_area_pred", m.hysteresis_area_pred},
              {"samples", m.samples}};
}
}  // namespace

std::string metrics_to_json(const EvalMetrics& m) { return metrics_json(m).dump(2); }

void save_metrics(const std::string& path, const std::map<std::string, EvalMetrics>& table) {
  json j{{"schema_major", kSchemaMajor}};
  for (const auto& [name, m] : table) j[name] = metrics_json(m);
  write_text_atomic(path, j.dump(2) + "\n");
}

FeatureSet feature_set_from_string(const std::string& s) {
  if (s == "pose") return FeatureSet::Pose;
  if (s == "pose_rate") return FeatureSet::PoseRate;
  if (s == "pose_rate_accel") return FeatureSet::PoseRateAccel;
  throw ConfigError("unknown feature_set '" + s + "'");
}

std::string to_string(FeatureSet fs) {
  switch (fs) {
    case FeatureSet::Pose: return "pose";
    case FeatureSet::PoseRate: return "pose_rate";
    case FeatureSet::PoseRateAccel: return "pose_rate_accel";
  }
  return "?";
}

// --- Run configuration -----------------------------------------------------

namespace {

// at() with a ConfigError naming the key instead of nlohmann's generic one.
template <typename T>
T get_key(const json& j, const std::string& key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for key '" + key + "'");
  }
}

ProbeKind probe_from_string(const std::string& s) {
  if (s == "flat") return ProbeKind::FlatProbe;
  if (s == "roller") return ProbeKind::Roller;
  if (s == "rod") return ProbeKind::CylindricalRod;
  if (s == "point") return ProbeKind::PointForce;
  throw ConfigError("unknown probe '" + s + "'");
}

Height height_from_int(int h) {
  switch (h) {
    case 1: return Height::H1;
    case 2: return Height::H2;
    case 3: return Height::H3;
    case 4: return Height::H4;
  }
  throw ConfigError("height must be 1..4");
}

LoadProtocol protocol_from_json(const json& j) {
  LoadProtocol p;
  p.probe = probe_from_string(get_key<std::string>(j, "probe", "flat"));
  p.angle_deg = get_key(j, "angle_deg", p.angle_deg);
  p.height = height_from_int(get_key(j, "height", 2));
  p.tilt_deg = get_key(j, "tilt_deg", p.tilt_deg);
  p.depth_mm = get_key(j, "depth_mm", p.depth_mm);
  p.speed_mm_per_s = get_key(j, "speed_mm_per_s", p.speed_mm_per_s);
  p.hold_s = get_key(j, "hold_s", p.hold_s);
  p.cycles = get_key(j, "cycles", p.cycles);
  p.wait_between_s = get_key(j, "wait_between_s", p.wait_between_s);
  p.force_n = get_key(j, "force_n", p.force_n);
  p.face = get_key<std::string>(j, "face", "primary") == "secondary" ? FaceId::Secondary
                                                                     : FaceId::Primary;
  p.location_mm = get_key(j, "location_mm", p.location_mm);
  p.validate();
  return p;
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  check_schema(j, "config");
  RunConfig c;
  c.raw_text = text;
  c.seed = get_key<std::uint64_t>(j, "seed", 0);
  c.output_dir = get_key<std::string>(j, "output_dir", c.output_dir);

  if (j.contains("scaffold")) {
    const json& s = j.at("scaffold");
    c.scaffold.solid = ScaffoldSpec::solid_from_string(
        get_key<std::string>(s, "solid", "pyramid_two_apex"));
    c.scaffold.layer_count = get_key(s, "layer_count", c.scaffold.layer_count);
    c.scaffold.base_half_mm = get_key(s, "base_half_mm", c.scaffold.base_half_mm);
    c.scaffold.height_mm = get_key(s, "height_mm", c.scaffold.height_mm);
    c.scaffold.top_half_mm = get_key(s, "top_half_mm", c.scaffold.top_half_mm);
    c.scaffold.tip_forward_mm = get_key(s, "tip_forward_mm", c.scaffold.tip_forward_mm);
  }
  if (j.contains("network")) {
    const json& n = j.at("network");
    c.network.band_scales = get_key(n, "band_scales", c.network.band_scales);
    c.network.bend_band_scales = get_key(n, "bend_band_scales", c.network.bend_band_scales);
    c.network.plate_axial_n = get_key(n, "plate_axial_n", c.network.plate_axial_n);
    c.network.brace_scale = get_key(n, "brace_scale", c.network.brace_scale);
    c.network.secondary_brace_scale =
        get_key(n, "secondary_brace_scale", c.network.secondary_brace_scale);
    c.network.stay_scale = get_key(n, "stay_scale", c.network.stay_scale);
    c.network.cross_stay_scale = get_key(n, "cross_stay_scale", c.network.cross_stay_scale);
    c.network.bend_beam_n_per_mm = get_key(n, "bend_beam_n_per_mm", c.network.bend_beam_n_per_mm);
    c.network.bend_flexure_n_per_mm =
        get_key(n, "bend_flexure_n_per_mm", c.network.bend_flexure_n_per_mm);
    c.network.contact_mu = get_key(n, "contact_mu", c.network.contact_mu);
    c.network.fps = get_key(n, "fps", c.network.fps);
  }
  if (j.contains("camera")) {
    const json& cam = j.at("camera");
    c.camera = CameraModel::for_resolution(get_key(cam, "width", 640),
                                           get_key(cam, "height", 360));
    c.camera.pixel_noise_sigma = get_key(cam, "pixel_noise_sigma", c.camera.pixel_noise_sigma);
  }
  if (j.contains("protocols"))
    for (const json& p : j.at("protocols")) c.protocols.push_back(protocol_from_json(p));
  if (j.contains("train")) {
    const json& t = j.at("train");
    c.train.batch = get_key(t, "batch", c.train.batch);
    c.train.learning_rate = get_key(t, "learning_rate", c.train.learning_rate);
    c.train.epochs = get_key(t, "epochs", c.train.epochs);
    c.train.seed = get_key<std::uint64_t>(t, "seed", c.seed);
    c.feature_set = feature_set_from_string(get_key<std::string>(t, "feature_set", "pose_rate"));
  } else {
    c.train.seed = c.seed;
  }
  if (j.contains("dataset")) {
    const json& d = j.at("dataset");
    c.dataset.feature_delta_t_s = get_key(d, "feature_delta_t_s", c.dataset.feature_delta_t_s);
    c.dataset.with_nodes = get_key(d, "with_nodes", c.dataset.with_nodes);
    c.dataset.use_vision = get_key(d, "use_vision", c.dataset.use_vision);
    c.dataset_protocols = get_key(d, "protocols", c.dataset_protocols);
  }
  if (j.contains("grasp")) {
    const json& g = j.at("grasp");
    c.grasp.gravity_n = get_key(g, "gravity_n", c.grasp.gravity_n);
    c.grasp.mu_true = get_key(g, "mu_true", c.grasp.mu_true);
    c.grasp.beta_deg = get_key(g, "beta_deg", c.grasp.beta_deg);
    c.grasp.grip_target_n = get_key(g, "grip_target_n", c.grasp.grip_target_n);
    c.grasp.max_force_n = get_key(g, "max_force_n", c.grasp.max_force_n);
    c.grasp.hold_s = get_key(g, "hold_s", c.grasp.hold_s);
    c.grasp.validate();
  }
  c.contour_radius_mm = get_key(j, "contour_radius_mm", c.contour_radius_mm);
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  return from_json_text(read_text(path));
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void RunManifest::save(const std::string& path) const {
  for (const std::string& f : files)
    if (!std::filesystem::exists(f)) throw ConfigError("manifest lists missing file: " + f);
  json j{{"schema_major", kSchemaMajor},
         {"config_hash", config_hash},
         {"version", version},
         {"files", files},
         {"timings_s", timings_s},
         {"notes", notes}};
  write_text_atomic(path, j.dump(2) + "\n");
}

}  // namespace softnet
