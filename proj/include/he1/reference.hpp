/// Closed-form helicoid and catenoid, and the same surfaces from the
/// Weierstrass data g = e^z, dh = i dz on the plane.
#pragma once

#include <vector>

#include "surface.hpp"
#include "weierstrass.hpp"

namespace he1 {

/// Straight segment in the parameter plane; w is taken as 1 so that u = z.
struct PlaneSegment {
  cplx z0, z1;
  PathSample sample(double s) const {
    const cplx d = z1 - z0;
    return {z0 + d * s, 1.0, d, d};
  }
};

/// Polyline z0 -> ... -> zn in the plane.
inline std::vector<PlaneSegment> plane_polyline(const std::vector<cplx>& pts) {
  std::vector<PlaneSegment> p;
  for (std::size_t k = 1; k < pts.size(); ++k) p.push_back({pts[k - 1], pts[k]});
  return p;
}

/// g = e^z and dh = phase * i dz. phase = 1 is the helicoid; phase = -i gives
/// the conjugate surface under the real part.
struct HelicoidData {
  cplx phase = 1.0;
  cplx dlog_g(const PathSample& p) const { return p.dz_ds; }
  cplx dh_ds(const PathSample& p) const { return phase * I * p.dz_ds; }
};

inline Vec3 helicoid_closed(cplx zp) {
  const double x = zp.real(), y = zp.imag();
  return {std::sinh(x) * std::sin(y), -std::sinh(x) * std::cos(y), -y};
}

inline Vec3 catenoid_closed(cplx zp) {
  const double x = zp.real(), y = zp.imag();
  return {-std::cosh(x) * std::cos(y) + 1.0, -std::cosh(x) * std::sin(y), x};
}

/// Real part of the Weierstrass integrals from 0 along the polyline 0 -> pts...
inline SurfacePoint helicoid_point(const std::vector<cplx>& pts, const CoupledOptions& opt = {}) {
  std::vector<cplx> all{0.0};
  all.insert(all.end(), pts.begin(), pts.end());
  return make_point(integrate_weierstrass(plane_polyline(all), HelicoidData{}, WeierstrassState{}, opt), false);
}

inline Vec3 helicoid_weierstrass(cplx zp, const CoupledOptions& opt = {}) { return helicoid_point({zp}, opt).position; }

/// Imaginary part of the helicoid integrals: the catenoid.
inline SurfacePoint conjugate_helicoid_point(const std::vector<cplx>& pts, const CoupledOptions& opt = {}) {
  std::vector<cplx> all{0.0};
  all.insert(all.end(), pts.begin(), pts.end());
  return make_point(integrate_weierstrass(plane_polyline(all), HelicoidData{}, WeierstrassState{}, opt), true);
}

inline Vec3 catenoid_weierstrass(cplx zp, const CoupledOptions& opt = {}) {
  return conjugate_helicoid_point({zp}, opt).position;
}

enum class ReferenceKind { helicoid, catenoid };

/// Grid mesh over [x0,x1] x [y0,y1] of the parameter plane, integrated from 0
/// along straight paths. Normals come from g = e^z.
inline SurfaceMesh reference_mesh(ReferenceKind kind, int resolution, double x0 = -2, double x1 = 2, double y0 = -pi,
                                  double y1 = pi, const CoupledOptions& opt = {}) {
  if (resolution < 2) throw Error(ErrorKind::invalid_params, "resolution must be at least 2");
  SurfaceMesh m;
  m.resolution = resolution;
  const int n = resolution + 1;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const cplx zp{x0 + (x1 - x0) * i / resolution, y0 + (y1 - y0) * j / resolution};
      SurfacePoint p = kind == ReferenceKind::helicoid ? helicoid_point({zp}, opt) : conjugate_helicoid_point({zp}, opt);
      p.flat_coord = zp;
      m.vertices.push_back(p);
      m.grid.push_back({i, j});
      const bool edge = i == 0 || j == 0 || i == resolution || j == resolution;
      m.boundary_tag.push_back(edge ? VertexTag::boundary : VertexTag::interior);
    }
  for (int j = 0; j < resolution; ++j)
    for (int i = 0; i < resolution; ++i) {
      const int a = j * n + i, b = a + 1, c = a + n + 1, d = a + n;
      m.triangles.push_back({a, b, c});
      m.triangles.push_back({a, c, d});
    }
  return m;
}

/// Latitude-longitude sphere of the given radius about the origin, outward
/// normals. Not minimal: a control for the mean-curvature check.
inline SurfaceMesh sphere_mesh(int resolution, double radius = 1.0) {
  if (resolution < 4) throw Error(ErrorKind::invalid_params, "resolution must be at least 4");
  SurfaceMesh m;
  m.resolution = resolution;
  const int nlat = resolution / 2, nlon = resolution;
  auto add = [&](double th, double ph) {
    SurfacePoint p;
    p.normal = {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
    p.position = radius * p.normal;
    p.flat_coord = {ph, th};
    m.vertices.push_back(p);
  };
  add(0, 0);
  for (int i = 1; i < nlat; ++i)
    for (int j = 0; j < nlon; ++j) add(pi * i / nlat, 2 * pi * j / nlon);
  add(pi, 0);
  const int south = static_cast<int>(m.vertices.size()) - 1;
  auto ring = [&](int i, int j) { return 1 + (i - 1) * nlon + (j % nlon); };
  for (int j = 0; j < nlon; ++j) {
    m.triangles.push_back({0, ring(1, j), ring(1, j + 1)});
    for (int i = 1; i + 1 < nlat; ++i) {
      m.triangles.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
      m.triangles.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
    }
    m.triangles.push_back({ring(nlat - 1, j), south, ring(nlat - 1, j + 1)});
  }
  m.boundary_tag.assign(m.vertices.size(), VertexTag::interior);
  return m;
}

/// Flat square grid in the x1x2-plane over [-1, 1]^2.
inline SurfaceMesh plane_mesh(int resolution) {
  if (resolution < 2) throw Error(ErrorKind::invalid_params, "resolution must be at least 2");
  SurfaceMesh m;
  m.resolution = resolution;
  const int n = resolution + 1;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      SurfacePoint p;
      p.position = {-1.0 + 2.0 * i / resolution, -1.0 + 2.0 * j / resolution, 0.0};
      p.normal = {0, 0, 1};
      p.flat_coord = {p.position[0], p.position[1]};
      m.vertices.push_back(p);
      m.grid.push_back({i, j});
      m.boundary_tag.push_back(i == 0 || j == 0 || i == resolution || j == resolution ? VertexTag::boundary
                                                                                      : VertexTag::interior);
    }
  for (int j = 0; j < resolution; ++j)
    for (int i = 0; i < resolution; ++i) {
      const int a = j * n + i, b = a + 1, c = a + n + 1, d = a + n;
      m.triangles.push_back({a, b, c});
      m.triangles.push_back({a, c, d});
    }
  return m;
}

}  // namespace he1
