// Offline calibration helper: reports the stiffness profile and adaptive
// factors for a candidate NetworkConfig so the default band scales can be
// tuned against the target table. Not registered as a test.

#include <cstdio>
#include <string>
#include <vector>

#include "softnet/protocol.hpp"

using namespace softnet;

namespace {

void sweep(const NetworkConfig& cfg, double depth_mm) {
  const PolyhedralScaffold scaffold = build_scaffold(ScaffoldSpec{});
  ElementNetwork net(scaffold, cfg);
  for (double a : {0.0, 45.0, 90.0})
    for (Height h : {Height::H1, Height::H2, Height::H3, Height::H4}) {
      ElementNetwork n2 = net;
      n2.reset();
      n2.config().fps = 60.0;
      LoadProtocol p;
      p.probe = ProbeKind::FlatProbe;
      p.angle_deg = a;
      p.height = h;
      p.depth_mm = depth_mm;
      p.speed_mm_per_s = 3.0;
      const ProtocolRun run = run_protocol_partial(n2, p);
      double pf = 0.0, pd = 0.0;
      for (const auto& f : run.frames)
        if (f.probe_position_mm >= pd) {
          pd = f.probe_position_mm;
          pf = f.contact_force_n;
        }
      std::printf("a=%2.0f h=%d ok=%d frames=%zu peak_depth=%.2f k=%.4f %s\n", a,
                  static_cast<int>(h) + 1, run.completed ? 1 : 0, run.frames.size(), pd,
                  pd > 0 ? pf / pd : 0.0, run.error.c_str());
    }
}

void report(const NetworkConfig& cfg, double depth_mm) {
  const PolyhedralScaffold scaffold = build_scaffold(ScaffoldSpec{});
  std::printf("nodes=%zu edges=%zu bands=%d features=%zu\n", scaffold.nodes.size(),
              scaffold.edges.size(), scaffold.band_count, scaffold.feature_nodes.size());

  ElementNetwork net(scaffold, cfg);
  const std::vector<double> angles = {0.0, 45.0, 90.0};
  const std::vector<Height> heights = {Height::H1, Height::H2, Height::H3, Height::H4};
  const StiffnessProfile prof = compute_stiffness_profile(net, angles, heights, depth_mm);
  std::printf("stiffness k (N/mm), rows alpha = 0/45/90, cols H1..H4\n");
  for (int r = 0; r < prof.k_n_per_mm.rows(); ++r) {
    for (int c = 0; c < prof.k_n_per_mm.cols(); ++c)
      std::printf("  %7.4f", prof.k_n_per_mm(r, c));
    std::printf("\n");
  }
  std::printf("targets alpha0: H1=1.400 H3=0.700 H4=0.825 (U shape)\n");

  const std::vector<double> locs = default_kappa_locations(scaffold, FaceId::Primary);
  const double kf = 5.0;
  const AdaptiveProfile ap = measure_adaptive_profile(net, FaceId::Primary, locs, kf);
  std::printf("adaptive kappa (primary, L1..L4):");
  for (double k : ap.kappa) std::printf("  %7.4f", k);
  std::printf("  (max should sit at L3)\n");
  const AdaptiveProfile as = measure_adaptive_profile(net, FaceId::Secondary, {locs[0]}, kf);
  std::printf("  kappa1/kappa2 at L1 = %.4f (target 1.70)\n",
              ap.kappa[0] / std::max(1e-12, as.kappa[0]));
}

}  // namespace

int main(int argc, char** argv) {
  NetworkConfig cfg;
  // Optional overrides:
  //   calibrate s0..s5 [bend_beam bend_flexure [brace_scale secondary_brace_scale]]
  if (argc >= 7) {
    cfg.band_scales.clear();
    for (int i = 1; i <= 6; ++i) cfg.band_scales.push_back(std::stod(argv[i]));
  }
  if (argc >= 9) {
    cfg.bend_beam_n_per_mm = std::stod(argv[7]);
    cfg.bend_flexure_n_per_mm = std::stod(argv[8]);
  }
  if (argc >= 11) {
    cfg.brace_scale = std::stod(argv[9]);
    cfg.secondary_brace_scale = std::stod(argv[10]);
  }
  double depth = 3.0;
  if (argc >= 12) depth = std::stod(argv[11]);
  if (argc >= 13) cfg.plate_axial_n = std::stod(argv[12]);
  if (argc >= 16) {  // bend scales for bands 0..2 (column spans)
    cfg.bend_band_scales.assign(6, 1.0);
    for (int i = 0; i < 3; ++i) cfg.bend_band_scales[i] = std::stod(argv[13 + i]);
  }
  if (argc >= 17) cfg.stay_scale = std::stod(argv[16]);
  if (argc >= 18) cfg.cross_stay_scale = std::stod(argv[17]);
  try {
    if (depth < 0.0)  // negative depth: per-cell convergence sweep at |depth|
      sweep(cfg, -depth);
    else
      report(cfg, depth);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "calibrate failed: %s\n", e.what());
    return 1;
  }
  return 0;
}
