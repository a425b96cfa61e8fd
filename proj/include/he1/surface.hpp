/// Points and triangle meshes of the genus-one helicoid from its Weierstrass data.
#pragma once

#include <algorithm>
#include <deque>
#include <optional>
#include <type_traits>
#include <vector>

#include "curve.hpp"
#include "forms.hpp"
#include "weierstrass.hpp"

namespace he1 {

struct SurfacePoint {
  Vec3 position{};
  Vec3 normal{};
  cplx flat_coord{};
  cplx gauss{};
};

enum class VertexTag : unsigned char { interior = 0, boundary = 1 };

struct SurfaceMesh {
  std::vector<SurfacePoint> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<VertexTag> boundary_tag;
  /// Grid position (i, j) of each vertex when the mesh comes from a flat grid.
  std::vector<std::array<int, 2>> grid;
  int resolution = 0;
};

/// g at the base point (lambda, 0). The two symmetry lines meet there, which
/// forces g = +1 or -1; +1 puts the line over z >= lambda on the x3-axis and
/// the line over z <= lambda on the x2-axis.
inline cplx g_at_base(const HandleParams&) { return 1.0; }

inline SurfacePoint make_point(const WeierstrassState& s, bool imaginary) {
  SurfacePoint p;
  p.position = imaginary ? imag_part(s.phi) : real_part(s.phi);
  p.gauss = std::exp(s.log_g);
  p.normal = normal_from_gauss(p.gauss);
  p.flat_coord = s.u;
  return p;
}

/// X(p) = Re of the Weierstrass integrals along a path from the base point.
template <class Seg>
SurfacePoint evaluate_point(const HandleParams& params, const std::vector<Seg>& path, cplx g0,
                            const CoupledOptions& opt = {}) {
  const auto data = curve_data(params);
  if constexpr (std::is_same_v<Seg, LiftedSegment>) check_pole_clearance(data.dgg, path);
  WeierstrassState s;
  s.log_g = std::log(g0);
  return make_point(integrate_weierstrass(path, data, s, opt), false);
}
template <class Seg>
SurfacePoint evaluate_point(const HandleParams& params, const std::vector<Seg>& path, const CoupledOptions& opt = {}) {
  return evaluate_point(params, path, g_at_base(params), opt);
}

/// Same integration, imaginary part: the conjugate surface. It is only defined
/// up to the imaginary periods, which the period problem leaves open.
template <class Seg>
SurfacePoint conjugate_evaluate(const HandleParams& params, const std::vector<Seg>& path,
                                const CoupledOptions& opt = {}) {
  const auto data = curve_data(params);
  if constexpr (std::is_same_v<Seg, LiftedSegment>) check_pole_clearance(data.dgg, path);
  WeierstrassState s;
  s.log_g = std::log(g_at_base(params));
  return make_point(integrate_weierstrass(path, data, s, opt), true);
}

struct MeshOptions {
  CoupledOptions coupled{};
  /// Grid edges that pass closer than this (in the flat coordinate, relative to
  /// the cell size) to a zero or pole of g are not used for integration.
  double pole_clearance = 0.05;
};

namespace detail {

/// Distance from p to the segment [a, b] in the plane.
inline double segment_distance(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  const double t = len2 > 0 ? std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0) : 0.0;
  return std::abs(p - (a + t * d));
}

}  // namespace detail

/// Meshes one fundamental parallelogram u = (i w1 + j w2)/N of the flat
/// coordinate, w1 and w2 the periods over B and its mirror image, with the
/// base point at u = 0. Vertices with |z| > end_cutoff are dropped. Each vertex
/// is integrated from a grid neighbour along a straight flat path, following a
/// breadth-first spanning tree from the base point.
inline SurfaceMesh build_mesh(const HandleParams& params, int resolution, double end_cutoff,
                              const MeshOptions& opt = {}) {
  if (resolution < 8) throw Error(ErrorKind::invalid_params, "resolution must be at least 8");
  if (!(end_cutoff > 0)) throw Error(ErrorKind::invalid_params, "end cutoff must be positive");
  const int N = resolution;
  const HCurve curve(params.lambda);
  const auto& eq = curve.equation();
  const cplx w1 = period(curve.cycle_b()), w2 = period(curve.cycle_b_conjugate());
  auto u_of = [&](int i, int j) { return (static_cast<double>(i) * w1 + static_cast<double>(j) * w2) / static_cast<double>(N); };
  const double cell = std::min(std::abs(w1), std::abs(w2)) / N;
  const auto data = curve_data(params);

  // Flat coordinates of the two points over z = a, reduced to the parallelogram.
  std::vector<cplx> poles;
  {
    const auto to_a = lift_polyline(curve, curve.base(), {cplx{params.a, 0.0}});
    for (int sheet : {1, -1}) {
      const cplx ua = static_cast<double>(sheet) * abelian_map(to_a);
      for (int m = -2; m <= 2; ++m)
        for (int n = -2; n <= 2; ++n) poles.push_back(ua + static_cast<double>(m) * w1 + static_cast<double>(n) * w2);
    }
  }
  auto edge_clear = [&](cplx ua, cplx ub) {
    for (cplx q : poles)
      if (detail::segment_distance(q, ua, ub) < opt.pole_clearance * cell) return false;
    return true;
  };

  enum State : unsigned char { unseen, done, excluded };
  std::vector<State> state(N * N, unseen);
  std::vector<CurvePoint> cp(N * N);
  std::vector<WeierstrassState> ws(N * N);
  auto id = [N](int i, int j) { return ((i % N + N) % N) * N + ((j % N + N) % N); };

  state[0] = done;
  cp[0] = curve.base();
  ws[0].log_g = std::log(g_at_base(params));
  std::deque<std::array<int, 2>> queue{{0, 0}};
  const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
  while (!queue.empty()) {
    const auto [i, j] = queue.front();
    queue.pop_front();
    const int v = id(i, j);
    for (int k = 0; k < 4; ++k) {
      const int ni = i + di[k], nj = j + dj[k], nv = id(ni, nj);
      if (state[nv] != unseen) continue;
      const cplx du = u_of(di[k], dj[k]);
      const cplx uv = u_of(i, j);
      if (!edge_clear(uv, uv + du)) continue;
      std::optional<FlatSegment> seg;
      try {
        seg.emplace(eq, cp[v], du, 4 * end_cutoff + 10);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::reroute_failed) throw;
      }
      if (!seg) continue;
      const CurvePoint end = seg->end();
      if (std::abs(end.z) > end_cutoff) {
        state[nv] = excluded;
        continue;
      }
      cp[nv] = end;
      ws[nv] = integrate_weierstrass(*seg, data, ws[v], opt.coupled);
      state[nv] = done;
      queue.push_back({ni, nj});
    }
  }

  SurfaceMesh mesh;
  mesh.resolution = N;
  std::vector<int> index(N * N, -1);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const int v = id(i, j);
      if (state[v] != done) continue;
      index[v] = static_cast<int>(mesh.vertices.size());
      SurfacePoint p = make_point(ws[v], false);
      p.flat_coord = u_of(i, j);
      mesh.vertices.push_back(p);
      mesh.grid.push_back({i, j});
    }
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const int a = index[id(i, j)], b = index[id(i + 1, j)], c = index[id(i + 1, j + 1)], d = index[id(i, j + 1)];
      if (a < 0 || b < 0 || c < 0 || d < 0) continue;
      // Wound so that face normals agree with the stereographic normal of g.
      mesh.triangles.push_back({a, c, b});
      mesh.triangles.push_back({a, d, c});
    }
  mesh.boundary_tag.assign(mesh.vertices.size(), VertexTag::interior);
  for (std::size_t k = 0; k < mesh.vertices.size(); ++k) {
    const auto [i, j] = mesh.grid[k];
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        if (index[id(i + a, j + b)] < 0) mesh.boundary_tag[k] = VertexTag::boundary;
  }
  return mesh;
}

}  // namespace he1
