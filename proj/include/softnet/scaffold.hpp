#pragma once

#include <array>
#include <string>
#include <vector>

#include "softnet/common.hpp"

namespace softnet {

enum class BaseSolid { PyramidTwoApex, Prism, Tetrahedron };

enum class FaceId { Primary, Secondary };

struct ScaffoldSpec {
  BaseSolid solid = BaseSolid::PyramidTwoApex;
  int layer_count = 2;         // interior layers between base and top
  double base_half_mm = 20.0;  // half-width of the base polygon
  double height_mm = 60.0;
  double top_half_mm = 20.0;     // half-length of the top edge (pyramid variant)
  double tip_forward_mm = 24.0;  // fingertip overhang: apex ridge shifted toward -y

  static BaseSolid solid_from_string(const std::string& name);
};

// Node/edge beam scaffold produced by replacing polyhedron edges by beams
// and inserting interior layers with flexure joints. Column chains run
// from each base corner to the top, subdivided at every layer joint and
// at each segment mid-point, so all exported feature points are nodes.
struct PolyhedralScaffold {
  ScaffoldSpec spec;
  std::vector<Vec3> nodes;                // mm, reference configuration
  std::vector<std::array<int, 2>> edges;  // structural beams
  std::vector<bool> flexure_edge;         // layer-ring beams
  std::vector<bool> brace_edge;           // slender face diagonals
  std::vector<int> edge_face;             // exterior face id (0 front .. 3 left), -1 shared
  std::vector<bool> stay_edge;            // apex-to-base back stays
  std::vector<bool> cross_stay_edge;      // apex-to-opposite-corner x-restraints
  std::vector<int> edge_band;             // per-edge calibration band
  int band_count = 0;
  std::vector<std::array<int, 2>> stiffeners;    // marker-plate diagonals
  std::vector<std::array<int, 3>> bend_triples;  // straight column triples
  std::vector<bool> bend_at_flexure;             // triple centered on a layer joint
  std::vector<int> bend_band;                    // calibration band of the triple
  std::vector<int> base_nodes;                   // layer 0, fixed boundary
  std::vector<int> marker_plate_nodes;           // first-layer ring
  std::vector<int> feature_nodes;                // exported feature points (26 default)
  // Face centerline stations from base to tip: node pairs straddling the
  // face midline (averaged when measuring face displacement).
  std::vector<std::array<int, 2>> primary_face_stations;
  std::vector<std::array<int, 2>> secondary_face_stations;

  bool connected() const;
  const std::vector<std::array<int, 2>>& face_stations(FaceId f) const {
    return f == FaceId::Primary ? primary_face_stations : secondary_face_stations;
  }
  Vec3 station_point(FaceId f, std::size_t i) const;
  Vec3 face_inward_normal(FaceId f) const;
  double face_length(FaceId f) const;  // midline polyline length
};

// Builds the scaffold for a supported solid; layer_count must be >= 1.
PolyhedralScaffold build_scaffold(const ScaffoldSpec& spec);

}  // namespace softnet
