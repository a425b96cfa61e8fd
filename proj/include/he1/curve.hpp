/// The elliptic curve w^2 = (z - lambda)(z^2 + 1): sheet tracking along paths,
/// homology cycles, the abelian map u = int dz/w and its inverse.
#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <vector>

#include "core.hpp"
#include "quadrature.hpp"

namespace he1 {

struct CurvePoint {
  cplx z;
  cplx w;
};

/// Everything a path needs to know about the curve. Lambda is complex only so
/// that diagnostics can break the real structure on purpose.
struct CurveEquation {
  cplx lam;

  cplx P(cplx z) const { return (z - lam) * (z * z + 1.0); }
  cplx dP(cplx z) const { return 3.0 * z * z - 2.0 * lam * z + 1.0; }
  std::array<cplx, 3> branch_points() const { return {lam, I, -I}; }

  bool contains(const CurvePoint& p) const {
    const double scale = 1.0 + std::pow(std::abs(p.z), 3);
    return std::abs(p.w * p.w - P(p.z)) <= eps_curve * scale;
  }
  /// Product of (z - e') over the finite branch points e' other than e.
  cplx cofactor(cplx z, cplx e) const {
    cplx r = 1.0;
    for (cplx b : branch_points())
      if (b != e) r *= (z - b);
    return r;
  }
};

/// A point on a path with its derivatives; du_ds is dz/w per unit parameter,
/// computed without cancellation at branch points.
struct PathSample {
  cplx z;
  cplx w;
  cplx dz_ds;
  cplx du_ds;
};

/// One smooth piece of a lifted path, parametrised by s in [0,1].
///
/// Lines may start or end exactly at a finite branch point e. Those use
/// z = e + d s^2 (or d (1-s)^2), which makes dz/w smooth; w is carried as
/// a known prefactor times the continued root of the cofactor P/(z-e).
class LiftedSegment {
 public:
  enum class Shape { line, arc };
  enum class Branch { none, start, end };

  /// Straight line from z0 to z1, continuing w from w0 at z0.
  static LiftedSegment line(const CurveEquation& eq, cplx z0, cplx z1, cplx w0) {
    LiftedSegment s(eq, Shape::line, Branch::none);
    s.z0_ = z0;
    s.z1_ = z1;
    s.check_on_curve(z0, w0);
    s.check_clearance();
    s.build_anchors(w0);
    return s;
  }

  /// Line leaving the branch point e towards z1. sheet = +1 or -1 picks the lift.
  static LiftedSegment from_branch(const CurveEquation& eq, cplx e, cplx z1, int sheet) {
    LiftedSegment s(eq, Shape::line, Branch::start);
    s.e_ = e;
    s.z0_ = e;
    s.z1_ = z1;
    s.d_ = z1 - e;
    s.sqd_ = std::sqrt(s.d_);
    s.check_clearance();
    s.build_anchors(static_cast<double>(sheet >= 0 ? 1 : -1) * std::sqrt(eq.cofactor(e, e)));
    return s;
  }

  /// Line from (z0, w0) arriving at the branch point e.
  static LiftedSegment to_branch(const CurveEquation& eq, cplx z0, cplx w0, cplx e) {
    LiftedSegment s(eq, Shape::line, Branch::end);
    s.e_ = e;
    s.z0_ = z0;
    s.z1_ = e;
    s.d_ = z0 - e;
    s.sqd_ = std::sqrt(s.d_);
    s.check_on_curve(z0, w0);
    s.check_clearance();
    s.build_anchors(w0 / s.sqd_);
    return s;
  }

  /// Circular arc c + r e^{i theta}, theta from th0 to th1, continuing w0 at the start.
  static LiftedSegment arc(const CurveEquation& eq, cplx c, double r, double th0, double th1, cplx w0) {
    LiftedSegment s(eq, Shape::arc, Branch::none);
    s.c_ = c;
    s.r_ = r;
    s.th0_ = th0;
    s.th1_ = th1;
    s.z0_ = c + std::polar(r, th0);
    s.z1_ = c + std::polar(r, th1);
    s.check_on_curve(s.z0_, w0);
    s.check_clearance();
    s.build_anchors(w0);
    return s;
  }

  PathSample sample(double s) const {
    const double t = reversed_ ? 1.0 - s : s;
    PathSample p = raw(t);
    if (reversed_) {
      p.dz_ds = -p.dz_ds;
      p.du_ds = -p.du_ds;
    }
    if (flipped_) {
      p.w = -p.w;
      p.du_ds = -p.du_ds;
    }
    return p;
  }

  CurvePoint start() const {
    const auto p = sample(0.0);
    return {p.z, p.w};
  }
  CurvePoint end() const {
    const auto p = sample(1.0);
    return {p.z, p.w};
  }

  /// Same point set traversed backwards.
  LiftedSegment reversed() const {
    LiftedSegment s = *this;
    s.reversed_ = !reversed_;
    return s;
  }
  /// Same z-path lifted to the other sheet.
  LiftedSegment other_sheet() const {
    LiftedSegment s = *this;
    s.flipped_ = !flipped_;
    return s;
  }

  /// Distance from p to the z-image of the segment.
  double clearance(cplx p) const {
    if (shape_ == Shape::line) {
      const cplx d = z1_ - z0_;
      const double len2 = std::norm(d);
      double t = len2 > 0 ? ((p - z0_) * std::conj(d)).real() / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      return std::abs(p - (z0_ + t * d));
    }
    double m = std::abs(p - z0_);
    const int n = 2048;
    for (int k = 0; k <= n; ++k) {
      const double th = th0_ + (th1_ - th0_) * k / n;
      m = std::min(m, std::abs(p - (c_ + std::polar(r_, th))));
    }
    return m;
  }

  Shape shape() const { return shape_; }
  Branch branch() const { return reversed_ ? flip(branch_) : branch_; }
  /// The branch point this segment touches, if any.
  std::optional<cplx> branch_point() const {
    if (branch_ == Branch::none) return std::nullopt;
    return e_;
  }
  const CurveEquation& equation() const { return eq_; }

 private:
  LiftedSegment(const CurveEquation& eq, Shape shape, Branch branch) : eq_(eq), shape_(shape), branch_(branch) {}

  static Branch flip(Branch b) {
    if (b == Branch::start) return Branch::end;
    if (b == Branch::end) return Branch::start;
    return b;
  }

  cplx z_of(double t) const {
    switch (branch_) {
      case Branch::start: return e_ + d_ * (t * t);
      case Branch::end: return e_ + d_ * ((1 - t) * (1 - t));
      case Branch::none: break;
    }
    if (shape_ == Shape::line) return z0_ + (z1_ - z0_) * t;
    return c_ + std::polar(r_, th0_ + (th1_ - th0_) * t);
  }

  /// The smooth factor whose root is continued: P, or the cofactor at a branch end.
  cplx G(cplx z) const { return branch_ == Branch::none ? eq_.P(z) : eq_.cofactor(z, e_); }

  cplx root_G(double t, cplx z) const {
    auto it = std::upper_bound(anchor_s_.begin(), anchor_s_.end(), t);
    const std::size_t k = it == anchor_s_.begin() ? 0 : static_cast<std::size_t>(it - anchor_s_.begin()) - 1;
    return anchor_root_[k] * std::sqrt(G(z) / anchor_G_[k]);
  }

  PathSample raw(double t) const {
    PathSample p;
    p.z = z_of(t);
    const cplx rg = root_G(t, p.z);
    switch (branch_) {
      case Branch::start:
        p.w = sqd_ * t * rg;
        p.dz_ds = 2.0 * d_ * t;
        p.du_ds = 2.0 * sqd_ / rg;
        return p;
      case Branch::end:
        p.w = sqd_ * (1 - t) * rg;
        p.dz_ds = -2.0 * d_ * (1 - t);
        p.du_ds = -2.0 * sqd_ / rg;
        return p;
      case Branch::none: break;
    }
    p.w = rg;
    if (shape_ == Shape::line)
      p.dz_ds = z1_ - z0_;
    else
      p.dz_ds = I * (th1_ - th0_) * std::polar(r_, th0_ + (th1_ - th0_) * t);
    p.du_ds = p.dz_ds / p.w;
    return p;
  }

  void check_on_curve(cplx z, cplx w) const {
    if (!eq_.contains({z, w})) throw Error(ErrorKind::invalid_params, "start point is not on the curve");
  }

  void check_clearance() const {
    for (cplx b : eq_.branch_points()) {
      if (branch_ != Branch::none && b == e_) continue;
      if (clearance(b) < delta_path) throw Error(ErrorKind::path_too_close, "path passes near a branch point");
    }
  }

  /// Walks s from 0 to 1, keeping arg(G(s)/G(anchor)) below pi/4 on each step.
  void build_anchors(cplx root0) {
    double t = 0.0, h = 1.0 / 16;
    cplx Gk = G(z_of(0.0));
    anchor_s_ = {0.0};
    anchor_G_ = {Gk};
    anchor_root_ = {root0};
    while (t < 1.0) {
      h = std::min(h, 1.0 - t);
      bool ok = true;
      for (int q = 1; q <= 4 && ok; ++q) {
        const cplx ratio = G(z_of(t + h * q / 4.0)) / Gk;
        ok = std::abs(std::arg(ratio)) < pi / 4;
      }
      if (!ok) {
        h *= 0.5;
        if (h < 1e-14) throw Error(ErrorKind::continuation_failed, "continuation step underflow");
        continue;
      }
      const double tn = (1.0 - t - h < 1e-15) ? 1.0 : t + h;
      const cplx Gn = G(z_of(tn));
      anchor_root_.push_back(anchor_root_.back() * std::sqrt(Gn / Gk));
      anchor_s_.push_back(tn);
      anchor_G_.push_back(Gn);
      Gk = Gn;
      t = tn;
      h = std::min(2 * h, 1.0 / 8);
    }
    // The final anchor at s=1 is never used as a left anchor.
    anchor_s_.back() = 2.0;
  }

  CurveEquation eq_;
  Shape shape_;
  Branch branch_;
  cplx z0_{}, z1_{}, e_{}, d_{}, sqd_{}, c_{};
  double r_ = 0, th0_ = 0, th1_ = 0;
  bool reversed_ = false, flipped_ = false;
  std::vector<double> anchor_s_;
  std::vector<cplx> anchor_G_, anchor_root_;
};

using Path = std::vector<LiftedSegment>;

inline Path reversed(const Path& p) {
  Path r;
  for (auto it = p.rbegin(); it != p.rend(); ++it) r.push_back(it->reversed());
  return r;
}

inline Path other_sheet(const Path& p) {
  Path r;
  for (const auto& s : p) r.push_back(s.other_sheet());
  return r;
}

inline Path concat(Path a, const Path& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

struct Cycle {
  Path segments;
  bool closed = true;

  Cycle reversed() const { return {he1::reversed(segments), closed}; }
  Cycle repeated(int times) const {
    Cycle c{{}, closed};
    for (int k = 0; k < times; ++k) c.segments = concat(c.segments, segments);
    return c;
  }
  bool is_closed(double tol = eps_curve) const {
    if (segments.empty()) return true;
    const auto a = segments.front().start(), b = segments.back().end();
    return std::abs(a.z - b.z) <= tol && std::abs(a.w - b.w) <= tol;
  }
};

/// Two-sheet loop around the polyline e_start -> corners... -> e_end joining two
/// branch points: out on the given sheet, back on the other.
inline Cycle branch_loop(const CurveEquation& eq, cplx e_start, cplx e_end, std::vector<cplx> corners, int sheet = 1) {
  if (corners.empty()) corners.push_back(0.5 * (e_start + e_end));
  Path out;
  out.push_back(LiftedSegment::from_branch(eq, e_start, corners.front(), sheet));
  for (std::size_t k = 1; k < corners.size(); ++k)
    out.push_back(LiftedSegment::line(eq, corners[k - 1], corners[k], out.back().end().w));
  out.push_back(LiftedSegment::to_branch(eq, corners.back(), out.back().end().w, e_end));
  return {concat(out, reversed(other_sheet(out))), true};
}

/// The curve with its branch points and the chosen homology basis.
///
/// A encircles {-i, +i}, passing to the right of lambda through lambda + 1.
/// B encircles {lambda, +i} along the straight segment between them. Both are
/// anchored at a branch point, where w = 0 regardless of sheet.
class HCurve {
 public:
  explicit HCurve(double lambda) : HCurve(cplx{lambda, 0.0}) {}

  /// Any complex lambda; only meant for diagnostics that break the real structure.
  static HCurve diagnostic(cplx lambda) { return HCurve(lambda); }

  double lambda() const { return eq_.lam.real(); }
  cplx lambda_complex() const { return eq_.lam; }
  bool is_real() const { return eq_.lam.imag() == 0.0; }
  const CurveEquation& equation() const { return eq_; }
  std::array<cplx, 3> finite_branch_points() const { return eq_.branch_points(); }
  bool contains(const CurvePoint& p) const { return eq_.contains(p); }

  const Cycle& cycle_a() const { return a_; }
  const Cycle& cycle_b() const { return b_; }
  /// The mirror image of B under z -> conj(z): the loop around {lambda, -i}.
  Cycle cycle_b_conjugate() const { return branch_loop(eq_, eq_.lam, -I, {}); }

  /// Point over z on the sheet where w is sheet * principal sqrt.
  CurvePoint point(cplx z, int sheet = 1) const { return {z, static_cast<double>(sheet) * std::sqrt(eq_.P(z))}; }
  /// The base point (lambda, 0).
  CurvePoint base() const { return {eq_.lam, 0.0}; }

 private:
  explicit HCurve(cplx lambda) : eq_{lambda} {
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
      throw Error(ErrorKind::invalid_params, "lambda must be finite");
    for (cplx b : {I, -I})
      if (std::abs(lambda - b) < 10 * delta_path)
        throw Error(ErrorKind::invalid_params, "branch points must be distinct");
    a_ = branch_loop(eq_, -I, I, {eq_.lam + 1.0});
    b_ = branch_loop(eq_, eq_.lam, I, {});
  }

  CurveEquation eq_;
  Cycle a_, b_;
};

/// Integral of dz/w along a lifted path.
inline cplx abelian_map(const Path& path, const QuadratureOptions& opt = {}) {
  cplx u{};
  for (const auto& seg : path) u += integrate_unit_scalar([&](double s) { return seg.sample(s).du_ds; }, opt);
  return u;
}
inline cplx abelian_map(const HCurve&, const Path& path, const QuadratureOptions& opt = {}) {
  return abelian_map(path, opt);
}
inline cplx period(const Cycle& c, const QuadratureOptions& opt = {}) { return abelian_map(c.segments, opt); }

/// Lifts the polyline start.z -> zs[0] -> zs[1] ... and returns the lifted path.
/// If start is a branch point, sheet selects the departing lift.
inline Path lift_polyline(const HCurve& curve, const CurvePoint& start, const std::vector<cplx>& zs, int sheet = 1) {
  const auto& eq = curve.equation();
  if (!eq.contains(start)) throw Error(ErrorKind::invalid_params, "start point is not on the curve");
  Path path;
  CurvePoint cur = start;
  for (std::size_t k = 0; k < zs.size(); ++k) {
    std::optional<cplx> from_e, to_e;
    for (cplx b : eq.branch_points()) {
      if (std::abs(cur.z - b) < 1e-14) from_e = b;
      if (std::abs(zs[k] - b) < 1e-14) to_e = b;
    }
    if (from_e && to_e) {
      const cplx mid = 0.5 * (cur.z + zs[k]);
      path.push_back(LiftedSegment::from_branch(eq, *from_e, mid, sheet));
      path.push_back(LiftedSegment::to_branch(eq, mid, path.back().end().w, *to_e));
    } else if (from_e) {
      path.push_back(LiftedSegment::from_branch(eq, *from_e, zs[k], sheet));
    } else if (to_e) {
      path.push_back(LiftedSegment::to_branch(eq, cur.z, cur.w, *to_e));
    } else {
      path.push_back(LiftedSegment::line(eq, cur.z, zs[k], cur.w));
    }
    cur = path.back().end();
  }
  return path;
}

/// Endpoint of the analytic continuation of start along the given polyline.
inline CurvePoint lift_path(const HCurve& curve, const CurvePoint& start, const std::vector<cplx>& zs, int sheet = 1) {
  if (zs.empty()) return start;
  return lift_polyline(curve, start, zs, sheet).back().end();
}

/// A path that is straight in the flat coordinate: u(s) = u0 + s du. Solves
/// dz/du = w, dw/du = P'(z)/2 by Taylor series, so branch points are ordinary
/// points of the flow. Only the end (a pole of z(u)) stops it.
class FlatSegment {
 public:
  static constexpr int order = 30;

  FlatSegment(const CurveEquation& eq, const CurvePoint& start, cplx du, double z_max = 1e7) : eq_(eq), du_(du) {
    if (!eq.contains(start)) throw Error(ErrorKind::invalid_params, "seed is not on the curve");
    double s = 0.0;
    cplx z = start.z, w = start.w;
    const double len = std::abs(du);
    if (len == 0.0) {
      steps_.push_back(make_step(0.0, z, w));
      steps_.back().s1 = 1.0;
      return;
    }
    for (int guard = 0; s < 1.0; ++guard) {
      if (guard > 200000) throw Error(ErrorKind::reroute_failed, "flow needs too many steps");
      Step st = make_step(s, z, w);
      double h = radius(st) / len;
      if (h < 1e-13) throw Error(ErrorKind::reroute_failed, "flow step underflow near the end");
      const double s1 = (s + h >= 1.0) ? 1.0 : s + h;
      st.s1 = s1;
      const cplx dh = (s1 - s) * du_;
      z = horner(st.zc, dh);
      w = horner(st.wc, dh);
      // w^2 - P(z) is conserved by the flow, so round-off picked up near the
      // end would persist. Project back onto the curve while the sheet is
      // unambiguous.
      const double scale = 1 + std::pow(std::abs(z), 3);
      if (std::norm(w) > 1e-4 * scale) w -= (w * w - eq_.P(z)) / (2.0 * w);
      if (!(std::abs(z) < z_max)) throw Error(ErrorKind::reroute_failed, "flow runs into the end");
      steps_.push_back(std::move(st));
      s = s1;
    }
  }

  PathSample sample(double s) const {
    auto it = std::upper_bound(steps_.begin(), steps_.end(), s, [](double v, const Step& st) { return v < st.s0; });
    const Step& st = it == steps_.begin() ? steps_.front() : *(it - 1);
    const cplx h = (s - st.s0) * du_;
    PathSample p;
    p.z = horner(st.zc, h);
    p.w = horner(st.wc, h);
    p.du_ds = du_;
    p.dz_ds = du_ * p.w;
    return p;
  }
  CurvePoint start() const { return {steps_.front().zc[0], steps_.front().wc[0]}; }
  CurvePoint end() const {
    const auto p = sample(1.0);
    return {p.z, p.w};
  }
  cplx displacement() const { return du_; }
  std::size_t step_count() const { return steps_.size(); }

 private:
  struct Step {
    double s0 = 0, s1 = 0;
    std::vector<cplx> zc, wc;
  };

  static cplx horner(const std::vector<cplx>& c, cplx h) {
    cplx acc{};
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * h + *it;
    return acc;
  }

  Step make_step(double s0, cplx z0, cplx w0) const {
    Step st;
    st.s0 = s0;
    st.zc.assign(order + 1, 0.0);
    st.wc.assign(order + 1, 0.0);
    st.zc[0] = z0;
    st.wc[0] = w0;
    for (int k = 0; k < order; ++k) {
      cplx zz{};
      for (int i = 0; i <= k; ++i) zz += st.zc[i] * st.zc[k - i];
      st.zc[k + 1] = st.wc[k] / static_cast<double>(k + 1);
      cplx rhs = 3.0 * zz - 2.0 * eq_.lam * st.zc[k];
      if (k == 0) rhs += 1.0;
      st.wc[k + 1] = rhs / (2.0 * (k + 1));
    }
    return st;
  }

  /// Step length in u keeping the last retained terms below round-off.
  static double radius(const Step& st) {
    const double zs = std::max(1.0, std::abs(st.zc[0]));
    const double ws = std::max(1.0, std::abs(st.wc[0]));
    double h = 1e300;
    for (int k = order - 1; k <= order; ++k) {
      const double az = std::abs(st.zc[k]), aw = std::abs(st.wc[k]);
      if (az > 0) h = std::min(h, std::pow(1e-17 * zs / az, 1.0 / k));
      if (aw > 0) h = std::min(h, std::pow(1e-17 * ws / aw, 1.0 / k));
    }
    return h;
  }

  CurveEquation eq_;
  cplx du_;
  std::vector<Step> steps_;
};

/// The point p with u(p) = u, reached by the flat flow from seed (whose own
/// coordinate is u_seed).
inline CurvePoint invert_abelian(const HCurve& curve, cplx u, const CurvePoint& seed, cplx u_seed = 0.0) {
  return FlatSegment(curve.equation(), seed, u - u_seed).end();
}

/// Lattice coordinates (m, n) with v = m omega_a + n omega_b.
inline std::array<double, 2> lattice_coordinates(cplx v, cplx omega_a, cplx omega_b) {
  const double det = omega_a.real() * omega_b.imag() - omega_a.imag() * omega_b.real();
  if (std::abs(det) < 1e-12) throw Error(ErrorKind::degenerate_basis, "period lattice is degenerate");
  return {(v.real() * omega_b.imag() - v.imag() * omega_b.real()) / det,
          (omega_a.real() * v.imag() - omega_a.imag() * v.real()) / det};
}

/// Homology basis of the curve with a nondegeneracy check on the dz/w periods.
inline std::pair<Cycle, Cycle> homology_basis(const HCurve& curve) {
  const cplx pa = period(curve.cycle_a()), pb = period(curve.cycle_b());
  const double det = pa.real() * pb.imag() - pa.imag() * pb.real();
  if (!(std::abs(det) >= 1e-12)) throw Error(ErrorKind::degenerate_basis, "period lattice determinant vanishes");
  return {curve.cycle_a(), curve.cycle_b()};
}

/// The end as seen in the local parameter t: z = 1/t^2, w = s(t)/t^3 with
/// s^2 = (1 - lambda t^2)(1 + t^4), s(0) = 1. The two sheets are t and -t.
struct EndChart {
  CurveEquation eq;

  cplx s_of(cplx t) const {
    const cplx t2 = t * t;
    return std::sqrt((1.0 - eq.lam * t2) * (1.0 + t2 * t2));
  }
  CurvePoint point(cplx t) const {
    const cplx t3 = t * t * t;
    return {1.0 / (t * t), s_of(t) / t3};
  }
  /// dz/w expressed per dt.
  cplx dz_over_w_dt(cplx t) const { return -2.0 / s_of(t); }
  /// dz per dt.
  cplx dz_dt(cplx t) const { return -2.0 / (t * t * t); }
};

}  // namespace he1
