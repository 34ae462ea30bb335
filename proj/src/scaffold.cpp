#include "softnet/scaffold.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace softnet {

BaseSolid ScaffoldSpec::solid_from_string(const std::string& name) {
  if (name == "pyramid_two_apex" || name == "pyramid") return BaseSolid::PyramidTwoApex;
  if (name == "prism") return BaseSolid::Prism;
  if (name == "tetrahedron") return BaseSolid::Tetrahedron;
  throw ConfigError("unsupported base solid: " + name);
}

bool PolyhedralScaffold::connected() const {
  if (nodes.empty()) return false;
  std::vector<std::vector<int>> adj(nodes.size());
  for (const auto& e : edges) {
    adj[e[0]].push_back(e[1]);
    adj[e[1]].push_back(e[0]);
  }
  std::vector<bool> seen(nodes.size(), false);
  std::vector<int> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const int n = stack.back();
    stack.pop_back();
    for (int m : adj[n])
      if (!seen[m]) {
        seen[m] = true;
        ++count;
        stack.push_back(m);
      }
  }
  return count == nodes.size();
}

Vec3 PolyhedralScaffold::station_point(FaceId f, std::size_t i) const {
  const auto& st = face_stations(f);
  return 0.5 * (nodes[st[i][0]] + nodes[st[i][1]]);
}

Vec3 PolyhedralScaffold::face_inward_normal(FaceId f) const {
  return f == FaceId::Primary ? Vec3(0.0, 1.0, 0.0) : Vec3(1.0, 0.0, 0.0);
}

double PolyhedralScaffold::face_length(FaceId f) const {
  const auto& st = face_stations(f);
  if (st.size() < 2) throw DomainError("face has no midline");
  double len = 0.0;
  for (std::size_t i = 1; i < st.size(); ++i)
    len += (station_point(f, i) - station_point(f, i - 1)).norm();
  return len;
}

namespace {

struct Builder {
  PolyhedralScaffold s;
  std::map<std::pair<int, int>, int> edge_set;

  int add_node(const Vec3& p) {
    s.nodes.push_back(p);
    return static_cast<int>(s.nodes.size()) - 1;
  }

  void add_edge(int a, int b, bool flexure, int band, bool brace = false, int face = -1,
                bool stay = false, bool cross = false) {
    if (a == b) return;
    auto key = std::minmax(a, b);
    if (edge_set.count({key.first, key.second})) return;  // no duplicates
    edge_set[{key.first, key.second}] = static_cast<int>(s.edges.size());
    s.edges.push_back({a, b});
    s.flexure_edge.push_back(flexure);
    s.brace_edge.push_back(brace);
    s.edge_face.push_back(face);
    s.stay_edge.push_back(stay);
    s.cross_stay_edge.push_back(cross);
    s.edge_band.push_back(band);
  }

  // Subdivided chain from `from` to `to` with layer joints at even
  // stations and mid-points at odd ones. Returns station node ids
  // (2*(layers+1)+1 entries).
  std::vector<int> add_column(int from, int to, int layers, int band_offset) {
    const int segs = layers + 1;
    const int n_st = 2 * segs;  // interior stations to create
    std::vector<int> stations(n_st + 1);
    stations[0] = from;
    stations[n_st] = to;
    const Vec3 a = s.nodes[from], b = s.nodes[to];
    for (int k = 1; k < n_st; ++k)
      stations[k] = add_node(a + (b - a) * (static_cast<double>(k) / n_st));
    for (int k = 0; k < n_st; ++k)
      add_edge(stations[k], stations[k + 1], false, band_offset + k / 2);
    // Bending penalties along the chain; layer joints are flexures.
    for (int k = 1; k < n_st; ++k) {
      s.bend_triples.push_back({stations[k - 1], stations[k], stations[k + 1]});
      s.bend_at_flexure.push_back(k % 2 == 0);
      s.bend_band.push_back(band_offset + (k - 1) / 2);
    }
    return stations;
  }
};

}  // namespace

PolyhedralScaffold build_scaffold(const ScaffoldSpec& spec) {
  if (spec.layer_count < 1) throw ConfigError("scaffold: layer_count must be >= 1");
  if (spec.base_half_mm <= 0.0 || spec.height_mm <= 0.0)
    throw ConfigError("scaffold: dimensions must be positive");

  Builder b;
  b.s.spec = spec;
  const double a = spec.base_half_mm;
  const double h = spec.height_mm;
  const double c = spec.top_half_mm;
  const int L = spec.layer_count;

  switch (spec.solid) {
    case BaseSolid::PyramidTwoApex: {
      // Base corners: front-left, front-right, back-right, back-left.
      const int fl = b.add_node({-a, -a, 0}), fr = b.add_node({a, -a, 0});
      const int br = b.add_node({a, a, 0}), bl = b.add_node({-a, a, 0});
      // Fingertip overhang: the apex ridge sits forward of the base centre,
      // so a high flat probe on the primary face meets the ridge first and
      // loads the braced roof instead of bending a free column span.
      const double o = spec.tip_forward_mm;
      const int apex_l = b.add_node({-c, -o, h}), apex_r = b.add_node({c, -o, h});
      b.s.base_nodes = {fl, fr, br, bl};
      b.add_edge(fl, fr, false, 0);
      b.add_edge(fr, br, false, 0);
      b.add_edge(br, bl, false, 0);
      b.add_edge(bl, fl, false, 0);
      const auto col_fl = b.add_column(fl, apex_l, L, 0);
      const auto col_fr = b.add_column(fr, apex_r, L, 0);
      const auto col_br = b.add_column(br, apex_r, L, 0);
      const auto col_bl = b.add_column(bl, apex_l, L, 0);
      // Layer rings (flexure joints) and marker plate on the first layer.
      for (int l = 1; l <= L; ++l) {
        const int k = 2 * l;
        const int ring_band = (L + 1) + (l - 1);
        const std::array<int, 4> ring{col_fl[k], col_fr[k], col_br[k], col_bl[k]};
        for (int i = 0; i < 4; ++i) b.add_edge(ring[i], ring[(i + 1) % 4], true, ring_band);
        if (l == 1) {
          b.s.marker_plate_nodes.assign(ring.begin(), ring.end());
          b.s.stiffeners.push_back({ring[0], ring[2]});
          b.s.stiffeners.push_back({ring[1], ring[3]});
        }
      }
      b.add_edge(apex_l, apex_r, false, 2 * L + 1);  // top edge
      // Back stays: the real finger's inclined back face carries a tip load
      // as membrane action straight into the base; the truss idealization is
      // one diagonal from each apex to the back base corner. They share the
      // ridge band so one knob scales the whole tip assembly.
      // Each apex gets a front and a back stay; the pair blocks fore-aft
      // tip translation rigidly while leaving the sideways swing soft.
      b.add_edge(apex_l, bl, false, 2 * L + 1, false, -1, /*stay=*/true);
      b.add_edge(apex_r, br, false, 2 * L + 1, false, -1, /*stay=*/true);
      b.add_edge(apex_l, fl, false, 2 * L + 1, false, -1, /*stay=*/true);
      b.add_edge(apex_r, fr, false, 2 * L + 1, false, -1, /*stay=*/true);
      // Weak cross stays in the frontal plane: the side-face membranes give
      // the tip a small sideways restoring force, so the sideways swing is a
      // damped pendulum rather than a free one.
      b.add_edge(apex_l, fr, false, 2 * L + 1, false, -1, false, /*cross=*/true);
      b.add_edge(apex_r, fl, false, 2 * L + 1, false, -1, false, /*cross=*/true);
      // Face X-braces between consecutive rings: the bare column/ring frame
      // has a twist mechanism about z (columns pivot at their bases without
      // bending), so each trapezoidal face gets crossed diagonals that turn
      // that mode into axial stretch. Uses existing nodes only.
      {
        const std::array<std::pair<const std::vector<int>*, const std::vector<int>*>, 4> faces{
            {{&col_fl, &col_fr}, {&col_fr, &col_br}, {&col_br, &col_bl}, {&col_bl, &col_fl}}};
        for (int g = 0; g <= L; ++g) {
          const int lo = 2 * g, hi = 2 * g + 2;
          for (int f = 0; f < 4; ++f) {
            const auto& [ca, cb] = faces[f];
            // Faces: 0 front (primary), 1 right, 2 back, 3 left (secondary).
            b.add_edge((*ca)[lo], (*cb)[hi], false, g, /*brace=*/true, f);
            b.add_edge((*cb)[lo], (*ca)[hi], false, g, /*brace=*/true, f);
          }
        }
      }
      b.s.band_count = 2 * L + 2;
      const int n_st = 2 * (L + 1);
      for (int k = 0; k <= n_st; ++k) {
        b.s.primary_face_stations.push_back({col_fl[k], col_fr[k]});
        b.s.secondary_face_stations.push_back({col_fl[k], col_bl[k]});
      }
      break;
    }
    case BaseSolid::Tetrahedron: {
      const double r = a;
      std::array<int, 3> corners;
      for (int i = 0; i < 3; ++i) {
        const double ang = -M_PI / 2 + 2.0 * M_PI * i / 3.0;
        corners[i] = b.add_node({r * std::cos(ang), r * std::sin(ang), 0});
      }
      const int apex = b.add_node({0, 0, h});
      b.s.base_nodes = {corners[0], corners[1], corners[2]};
      for (int i = 0; i < 3; ++i) b.add_edge(corners[i], corners[(i + 1) % 3], false, 0);
      std::array<std::vector<int>, 3> cols;
      for (int i = 0; i < 3; ++i) cols[i] = b.add_column(corners[i], apex, L, 0);
      for (int l = 1; l <= L; ++l) {
        const int k = 2 * l;
        const int ring_band = (L + 1) + (l - 1);
        for (int i = 0; i < 3; ++i) b.add_edge(cols[i][k], cols[(i + 1) % 3][k], true, ring_band);
        if (l == 1)
          b.s.marker_plate_nodes = {cols[0][k], cols[1][k], cols[2][k]};
      }
      b.s.band_count = 2 * L + 1;
      const int n_st = 2 * (L + 1);
      for (int k = 0; k <= n_st; ++k) {
        b.s.primary_face_stations.push_back({cols[0][k], cols[1][k]});
        b.s.secondary_face_stations.push_back({cols[1][k], cols[2][k]});
      }
      break;
    }
    case BaseSolid::Prism: {
      std::array<int, 3> lo, hi;
      for (int i = 0; i < 3; ++i) {
        const double ang = -M_PI / 2 + 2.0 * M_PI * i / 3.0;
        const Vec3 p(a * std::cos(ang), a * std::sin(ang), 0.0);
        lo[i] = b.add_node(p);
        hi[i] = b.add_node(p + Vec3(0, 0, h));
      }
      b.s.base_nodes = {lo[0], lo[1], lo[2]};
      for (int i = 0; i < 3; ++i) b.add_edge(lo[i], lo[(i + 1) % 3], false, 0);
      std::array<std::vector<int>, 3> cols;
      for (int i = 0; i < 3; ++i) cols[i] = b.add_column(lo[i], hi[i], L, 0);
      for (int l = 1; l <= L; ++l) {
        const int k = 2 * l;
        const int ring_band = (L + 1) + (l - 1);
        for (int i = 0; i < 3; ++i) b.add_edge(cols[i][k], cols[(i + 1) % 3][k], true, ring_band);
        if (l == 1)
          b.s.marker_plate_nodes = {cols[0][k], cols[1][k], cols[2][k]};
      }
      for (int i = 0; i < 3; ++i) b.add_edge(hi[i], hi[(i + 1) % 3], false, 2 * L + 1);
      b.s.band_count = 2 * L + 2;
      const int n_st = 2 * (L + 1);
      for (int k = 0; k <= n_st; ++k) {
        b.s.primary_face_stations.push_back({cols[0][k], cols[1][k]});
        b.s.secondary_face_stations.push_back({cols[1][k], cols[2][k]});
      }
      break;
    }
  }

  // Every node is a feature point: edge intersections plus mid-points.
  b.s.feature_nodes.resize(b.s.nodes.size());
  for (std::size_t i = 0; i < b.s.nodes.size(); ++i) b.s.feature_nodes[i] = static_cast<int>(i);
  return b.s;
}

}  // namespace softnet
