#pragma once

#include <vector>

#include "softnet/network.hpp"

namespace softnet {

enum class ProbeKind { FlatProbe, Roller, CylindricalRod, PointForce };
enum class Height { H1, H2, H3, H4 };

// One scripted loading experiment against the network.
struct LoadProtocol {
  ProbeKind probe = ProbeKind::FlatProbe;
  double angle_deg = 0.0;  // pushing angle alpha: 0 primary face, 90 secondary
  Height height = Height::H2;
  double tilt_deg = 0.0;  // gamma, rotation of the body about x
  double depth_mm = 9.0;
  double speed_mm_per_s = 3.0;
  double hold_s = 0.0;
  int cycles = 1;
  double wait_between_s = 0.0;
  double force_n = 0.0;        // constant load for creep-style protocols
  FaceId face = FaceId::Primary;
  double location_mm = 0.0;    // along the face midline for point loads

  void validate() const;
};

double height_z_mm(const PolyhedralScaffold& s, Height h);

// Runs the protocol at the network's configured frame rate, one frame per
// step. Throws SolverError mid-way; frames produced so far are returned
// through the exception-free overload below.
std::vector<SimFrame> run_protocol(ElementNetwork& net, const LoadProtocol& protocol);

struct ProtocolRun {
  std::vector<SimFrame> frames;
  bool completed = true;
  std::string error;
};
ProtocolRun run_protocol_partial(ElementNetwork& net, const LoadProtocol& protocol);

// Stiffness table k = F/delta per (alpha, height) at the given depth,
// probing at 3 mm/s from the rest configuration.
struct StiffnessProfile {
  std::vector<double> angles_deg;
  std::vector<Height> heights;
  MatX k_n_per_mm;  // rows: angles, cols: heights
};
StiffnessProfile compute_stiffness_profile(const ElementNetwork& net,
                                           const std::vector<double>& angles_deg,
                                           const std::vector<Height>& heights, double depth_mm);

struct AdaptiveProfile {
  FaceId face = FaceId::Primary;
  std::vector<double> locations_mm;  // L1..L4 along the face midline
  std::vector<double> kappa;         // per location
  std::vector<double> l_prime_mm;    // location of max displacement
  double face_length_mm = 0.0;
};

// Adaptive factor from a recorded loading: kappa = (D_max(l') - D_tip)/L
// evaluated at the frame of peak face displacement.
double compute_adaptive_factor(const std::vector<SimFrame>& frames,
                               const PolyhedralScaffold& scaffold, FaceId face,
                               double* l_prime_mm = nullptr);

// Runs point loads of `force_n` at each location and assembles the profile.
AdaptiveProfile measure_adaptive_profile(const ElementNetwork& net, FaceId face,
                                         const std::vector<double>& locations_mm, double force_n);

// Canonical L1..L4 probe locations along the face midline: sixth, third,
// half, and full arclength (L4 lands on the tip station).
std::vector<double> default_kappa_locations(const PolyhedralScaffold& s, FaceId face);

}  // namespace softnet
