/// Checks on triangle meshes: discrete mean curvature, normals against the
/// Gauss map, rigid symmetries, the rhombic lattice and the helicoidal end.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <map>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>
#include <vector>

#include "curve.hpp"
#include "surface.hpp"

namespace he1 {

struct MeanCurvatureStats {
  std::vector<double> value;  ///< |mean curvature vector| per vertex, NaN where skipped
  double max = 0;
  double median = 0;
  int evaluated = 0;
  int degenerate_triangles = 0;
};

namespace detail {

/// Vertices whose triangle fan closes up: every incident edge has two triangles.
inline std::vector<bool> closed_fans(const SurfaceMesh& m) {
  std::map<std::pair<int, int>, int> edges;
  for (const auto& t : m.triangles)
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      ++edges[{std::min(a, b), std::max(a, b)}];
    }
  std::vector<bool> ok(m.vertices.size(), true), touched(m.vertices.size(), false);
  for (const auto& [e, n] : edges) {
    touched[e.first] = touched[e.second] = true;
    if (n != 2) ok[e.first] = ok[e.second] = false;
  }
  for (std::size_t v = 0; v < ok.size(); ++v) ok[v] = ok[v] && touched[v];
  return ok;
}

inline double cot(const Vec3& a, const Vec3& b) { return dot(a, b) / norm(cross(a, b)); }

}  // namespace detail

/// Interior vertices: tagged interior and with a closed triangle fan.
inline std::vector<bool> interior_vertices(const SurfaceMesh& m) {
  auto ok = detail::closed_fans(m);
  for (std::size_t v = 0; v < ok.size(); ++v)
    if (v < m.boundary_tag.size() && m.boundary_tag[v] == VertexTag::boundary) ok[v] = false;
  return ok;
}

/// Cotangent Laplacian of the positions over the mixed Voronoi area:
/// |sum (cot a + cot b)(x_i - x_j)| / (2 A_i), which is 2H (2/r on a sphere).
inline MeanCurvatureStats discrete_mean_curvature(const SurfaceMesh& m) {
  const std::size_t n = m.vertices.size();
  std::vector<Vec3> lap(n, Vec3{0, 0, 0});
  std::vector<double> area(n, 0.0);
  std::vector<bool> bad(n, false);
  MeanCurvatureStats st;
  for (const auto& t : m.triangles) {
    const Vec3 p[3] = {m.vertices[t[0]].position, m.vertices[t[1]].position, m.vertices[t[2]].position};
    const double A = 0.5 * norm(cross(p[1] - p[0], p[2] - p[0]));
    if (!(A >= 1e-14)) {
      ++st.degenerate_triangles;
      for (int k = 0; k < 3; ++k) bad[t[k]] = true;
      continue;
    }
    double c[3];
    for (int k = 0; k < 3; ++k) c[k] = detail::cot(p[(k + 1) % 3] - p[k], p[(k + 2) % 3] - p[k]);
    for (int k = 0; k < 3; ++k) {
      const int i = (k + 1) % 3, j = (k + 2) % 3;  // edge opposite vertex k
      const Vec3 e = p[i] - p[j];
      lap[t[i]] = lap[t[i]] + c[k] * e;
      lap[t[j]] = lap[t[j]] - c[k] * e;
    }
    int obtuse = -1;
    for (int k = 0; k < 3; ++k)
      if (dot(p[(k + 1) % 3] - p[k], p[(k + 2) % 3] - p[k]) < 0) obtuse = k;
    for (int k = 0; k < 3; ++k) {
      if (obtuse < 0) {
        const int i = (k + 1) % 3, j = (k + 2) % 3;
        area[t[k]] += (dot(p[i] - p[k], p[i] - p[k]) * c[j] + dot(p[j] - p[k], p[j] - p[k]) * c[i]) / 8.0;
      } else {
        area[t[k]] += (k == obtuse ? A / 2 : A / 4);
      }
    }
  }
  const auto interior = interior_vertices(m);
  st.value.assign(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> vals;
  for (std::size_t v = 0; v < n; ++v) {
    if (!interior[v] || bad[v] || !(area[v] > 0)) continue;
    st.value[v] = norm(lap[v]) / (2 * area[v]);
    vals.push_back(st.value[v]);
  }
  st.evaluated = static_cast<int>(vals.size());
  if (!vals.empty()) {
    st.max = *std::max_element(vals.begin(), vals.end());
    std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
    st.median = vals[vals.size() / 2];
  }
  return st;
}

/// Largest angle in degrees between the area-weighted fan normal and the
/// stored vertex normal, over interior vertices.
inline double normal_deviation_max(const SurfaceMesh& m, std::vector<double>* per_vertex = nullptr) {
  std::vector<Vec3> fan(m.vertices.size(), Vec3{0, 0, 0});
  for (const auto& t : m.triangles) {
    const Vec3 a = m.vertices[t[0]].position, b = m.vertices[t[1]].position, c = m.vertices[t[2]].position;
    const Vec3 nrm = cross(b - a, c - a);
    for (int k = 0; k < 3; ++k) fan[t[k]] = fan[t[k]] + nrm;
  }
  const auto interior = interior_vertices(m);
  double worst = 0;
  if (per_vertex) per_vertex->assign(m.vertices.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    if (!interior[v]) continue;
    const double c = std::clamp(dot(normalized(fan[v]), m.vertices[v].normal), -1.0, 1.0);
    const double ang = std::acos(c) * 180.0 / pi;
    if (per_vertex) (*per_vertex)[v] = ang;
    worst = std::max(worst, ang);
  }
  return worst;
}

/// x -> R x + t.
struct RigidMotion {
  std::array<Vec3, 3> R{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
  Vec3 t{0, 0, 0};
  Vec3 operator()(const Vec3& x) const { return Vec3{dot(R[0], x), dot(R[1], x), dot(R[2], x)} + t; }

  static RigidMotion identity() { return {}; }
  /// Rotation by angle about the line through the origin along axis.
  static RigidMotion rotation(Vec3 axis, double angle) {
    axis = normalized(axis);
    const double c = std::cos(angle), s = std::sin(angle), C = 1 - c;
    const double x = axis[0], y = axis[1], z = axis[2];
    RigidMotion m;
    m.R = {Vec3{c + x * x * C, x * y * C - z * s, x * z * C + y * s},
           Vec3{y * x * C + z * s, c + y * y * C, y * z * C - x * s},
           Vec3{z * x * C - y * s, z * y * C + x * s, c + z * z * C}};
    return m;
  }
};

/// Largest distance from the image of a vertex to its nearest vertex, over an
/// evenly strided subsample of about `subsample` vertices.
inline double check_symmetry(const SurfaceMesh& m, const RigidMotion& motion, std::size_t subsample = 1000) {
  const std::size_t n = m.vertices.size();
  if (n == 0) return 0;
  const std::size_t stride = std::max<std::size_t>(1, n / subsample);
  double worst = 0;
  for (std::size_t v = 0; v < n; v += stride) {
    const Vec3 q = motion(m.vertices[v].position);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& u : m.vertices) {
      const Vec3 d = u.position - q;
      best = std::min(best, dot(d, d));
    }
    worst = std::max(worst, std::sqrt(best));
  }
  return worst;
}

/// ||w1| - |w2|| / |w1| for w1, w2 the dz/w periods over B and its mirror image.
inline double check_rhombic(const HCurve& curve, const QuadratureOptions& opt = {}) {
  const cplx w1 = period(curve.cycle_b(), opt), w2 = period(curve.cycle_b_conjugate(), opt);
  return std::abs(std::abs(w1) - std::abs(w2)) / std::abs(w1);
}

struct HelicoidFit {
  Vec3 axis_direction{0, 0, 1};
  Vec3 axis_point{0, 0, 0};
  double pitch = 0;  ///< twist rate d(theta)/d(height)
  double phase = 0;
  double relative_residual = 0;
  double outer_radius = 0;
  std::size_t points = 0;
  bool ok = false;
};

namespace detail {

/// Residuals r sin(theta - pitch h - phase) of a helicoid with axis direction
/// (tx, ty, 1) through (cx, cy, 0). Parameters: tx, ty, cx, cy, pitch, phase.
struct HelicoidResidual {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const std::vector<Vec3>* pts;
  double scale;

  int inputs() const { return 6; }
  int values() const { return static_cast<int>(pts->size()); }

  static void frame(const Eigen::VectorXd& x, Vec3& d, Vec3& c, Vec3& e1, Vec3& e2) {
    d = normalized(Vec3{x[0], x[1], 1.0});
    c = Vec3{x[2], x[3], 0.0};
    e1 = normalized(Vec3{1, 0, 0} - d[0] * d);
    e2 = cross(d, e1);
  }
  static void polar(const Vec3& p, const Vec3& d, const Vec3& c, const Vec3& e1, const Vec3& e2, double& r,
                    double& th, double& h) {
    const Vec3 v = p - c;
    h = dot(v, d);
    const Vec3 q = v - h * d;
    r = norm(q);
    th = std::atan2(dot(q, e2), dot(q, e1));
  }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    Vec3 d, c, e1, e2;
    frame(x, d, c, e1, e2);
    for (std::size_t k = 0; k < pts->size(); ++k) {
      double r, th, h;
      polar((*pts)[k], d, c, e1, e2, r, th, h);
      f[static_cast<int>(k)] = r * std::sin(th - x[4] * h - x[5]) / scale;
    }
    return 0;
  }
};

/// Best phase for a fixed axis and pitch and the resulting sum of squares:
/// sum r^2 sin^2(delta) = (sum r^2 - |S|)/2, S = sum r^2 e^{2i(theta - pitch h)}.
inline std::pair<double, double> best_phase(const std::vector<std::array<double, 3>>& rth, double pitch) {
  cplx S{};
  double R2 = 0;
  for (const auto& [r, th, h] : rth) {
    S += r * r * std::polar(1.0, 2 * (th - pitch * h));
    R2 += r * r;
  }
  return {0.5 * std::arg(S), 0.5 * (R2 - std::abs(S))};
}

}  // namespace detail

/// Least-squares helicoid through the given points. Starts from the x3-axis,
/// picks pitch by a grid search with the phase in closed form, then refines
/// axis tilt, axis offset, pitch and phase by Levenberg-Marquardt.
inline HelicoidFit fit_helicoid(const std::vector<Vec3>& pts, double max_pitch = 4.0) {
  HelicoidFit fit;
  fit.points = pts.size();
  if (pts.size() < 8) return fit;
  std::vector<std::array<double, 3>> rth;
  double R2 = 0;
  for (const auto& p : pts) {
    const double r = std::hypot(p[0], p[1]);
    rth.push_back({r, std::atan2(p[1], p[0]), p[2]});
    R2 += r * r;
    fit.outer_radius = std::max(fit.outer_radius, r);
  }
  if (!(R2 > 0)) return fit;
  double best_pitch = 0, best_ss = std::numeric_limits<double>::infinity();
  const int steps = 8001;
  for (int k = 0; k < steps; ++k) {
    const double pitch = -max_pitch + 2 * max_pitch * k / (steps - 1);
    const double ss = detail::best_phase(rth, pitch).second;
    if (ss < best_ss) {
      best_ss = ss;
      best_pitch = pitch;
    }
  }
  Eigen::VectorXd x(6);
  x << 0, 0, 0, 0, best_pitch, detail::best_phase(rth, best_pitch).first;
  const double scale = std::sqrt(R2 / pts.size());
  detail::HelicoidResidual res{&pts, scale};
  Eigen::NumericalDiff<detail::HelicoidResidual> nd(res);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<detail::HelicoidResidual>> lm(nd);
  lm.parameters.xtol = 1e-14;
  lm.parameters.ftol = 1e-14;
  lm.parameters.maxfev = 4000;
  lm.minimize(x);
  // The helicoid is invariant under phase -> phase + pi.
  Eigen::VectorXd f(pts.size());
  res(x, f);
  Vec3 d, c, e1, e2;
  detail::HelicoidResidual::frame(x, d, c, e1, e2);
  double rr = 0;
  for (const auto& p : pts) {
    double r, th, h;
    detail::HelicoidResidual::polar(p, d, c, e1, e2, r, th, h);
    rr += r * r;
  }
  fit.axis_direction = d;
  fit.axis_point = c;
  fit.pitch = x[4];
  fit.phase = std::remainder(x[5], pi);
  fit.relative_residual = std::sqrt(f.squaredNorm() * scale * scale / rr);
  fit.ok = std::isfinite(fit.relative_residual);
  return fit;
}

/// Vertices at distance at least inner_fraction * (max distance) from the x3-axis.
inline std::vector<Vec3> outer_annulus(const SurfaceMesh& m, double inner_fraction = 0.5) {
  double rmax = 0;
  for (const auto& v : m.vertices) rmax = std::max(rmax, std::hypot(v.position[0], v.position[1]));
  std::vector<Vec3> out;
  for (const auto& v : m.vertices)
    if (std::hypot(v.position[0], v.position[1]) >= inner_fraction * rmax) out.push_back(v.position);
  return out;
}

struct HelicoidTrendRow {
  double outer_radius;
  double relative_residual;
  double pitch;
};

/// Helicoid fit of the outer annulus of each mesh, in the order given.
inline std::vector<HelicoidTrendRow> check_helicoidal_end(const std::vector<const SurfaceMesh*>& meshes) {
  std::vector<HelicoidTrendRow> rows;
  for (const auto* m : meshes) {
    const auto f = fit_helicoid(outer_annulus(*m));
    rows.push_back({f.outer_radius, f.ok ? f.relative_residual : std::numeric_limits<double>::quiet_NaN(), f.pitch});
  }
  return rows;
}

inline bool strictly_decreasing(const std::vector<HelicoidTrendRow>& rows) {
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (!(rows[k].relative_residual < rows[k - 1].relative_residual)) return false;
  return !rows.empty();
}

/// One measured quantity against its threshold. Checks with below = false pass
/// when the value exceeds the threshold (negative controls).
struct CheckResult {
  std::string name;
  double value = 0;
  double threshold = 0;
  bool below = true;
  bool pass() const { return below ? value < threshold : value > threshold; }
};

struct VerificationReport {
  MeanCurvatureStats mean_curvature;
  double normal_deviation_max = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::pair<std::string, double>> symmetry_deviations;
  double rhombic_deviation = std::numeric_limits<double>::quiet_NaN();
  std::vector<HelicoidTrendRow> asymptote_trend;
  std::vector<CheckResult> checks;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass(); });
  }

  /// "key = value" lines, with comments for the reader. Per-vertex values are
  /// listed last.
  std::string to_string(bool per_vertex = true) const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "# he1 verification report\n";
    for (const auto& c : checks) {
      os << "check." << c.name << ".value = " << c.value << "\n";
      os << "check." << c.name << ".threshold = " << c.threshold << "\n";
      os << "check." << c.name << ".require = " << (c.below ? "below" : "above") << "\n";
      os << "check." << c.name << ".pass = " << (c.pass() ? "true" : "false") << "\n";
    }
    os << "mean_curvature.max = " << mean_curvature.max << "\n";
    os << "mean_curvature.median = " << mean_curvature.median << "\n";
    os << "mean_curvature.evaluated = " << mean_curvature.evaluated << "\n";
    os << "mean_curvature.degenerate_triangles = " << mean_curvature.degenerate_triangles << "\n";
    if (!std::isnan(normal_deviation_max)) os << "normal_deviation_max_deg = " << normal_deviation_max << "\n";
    for (const auto& [k, v] : symmetry_deviations) os << "symmetry." << k << " = " << v << "\n";
    if (!std::isnan(rhombic_deviation)) os << "rhombic_deviation = " << rhombic_deviation << "\n";
    for (std::size_t k = 0; k < asymptote_trend.size(); ++k) {
      const auto& r = asymptote_trend[k];
      os << "trend." << k << " = " << r.outer_radius << " " << r.relative_residual << " " << r.pitch << "\n";
    }
    os << "overall.pass = " << (pass() ? "true" : "false") << "\n";
    if (per_vertex)
      for (std::size_t v = 0; v < mean_curvature.value.size(); ++v)
        if (!std::isnan(mean_curvature.value[v])) os << "mean_curvature.vertex." << v << " = " << mean_curvature.value[v] << "\n";
    return os.str();
  }
};

}  // namespace he1
