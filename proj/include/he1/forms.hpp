/// Meromorphic 1-forms R(z) dz/w (or R(z) dz): the data dg/g and dh of the
/// genus-one helicoid, path integration and residues.
#pragma once

#include <vector>

#include "curve.hpp"
#include "polynomial.hpp"
#include "quadrature.hpp"

namespace he1 {

/// scale * numerator(z) / denominator(z) times dz/w (over_w) or dz.
struct RationalForm {
  Polynomial numerator{1.0};
  Polynomial denominator{1.0};
  bool over_w = true;
  cplx scale = 1.0;

  cplx coefficient(cplx z) const { return scale * numerator(z) / denominator(z); }
  /// Value of the form per unit path parameter.
  cplx per_ds(const PathSample& p) const { return coefficient(p.z) * (over_w ? p.du_ds : p.dz_ds); }
  /// The coefficient of dz at a point: R(z)/w or R(z).
  cplx at(const CurvePoint& p) const { return over_w ? coefficient(p.z) / p.w : coefficient(p.z); }

  std::vector<cplx> poles() const { return denominator.roots(); }
  std::vector<cplx> zeros() const { return numerator.roots(); }

  /// Numerator and denominator share no root within tol.
  bool is_reduced(double tol = 1e-10) const {
    for (cplx r : denominator.roots())
      for (cplx q : numerator.roots())
        if (std::abs(r - q) <= tol) return false;
    return true;
  }

  friend RationalForm operator*(cplx s, RationalForm f) {
    f.scale *= s;
    return f;
  }
  friend RationalForm operator+(const RationalForm& f, const RationalForm& g) {
    if (f.over_w != g.over_w) throw Error(ErrorKind::invalid_params, "cannot add forms of different type");
    RationalForm r;
    r.numerator = f.scale * (f.numerator * g.denominator) + g.scale * (g.numerator * f.denominator);
    r.denominator = f.denominator * g.denominator;
    r.over_w = f.over_w;
    r.scale = 1.0;
    return r;
  }
};

/// The holomorphic form dz/w.
inline RationalForm dz_over_w() { return {}; }

/// Phase of the height differential, dh = dh_phase (z - a) dz/w.
///
/// With this phase the embedded solution sits at lambda near +0.32 and a < lambda.
/// Multiplying by i instead gives the mirror-image normalisation z -> -z.
inline constexpr cplx dh_phase{1.0, 0.0};

/// The parameters lambda, a, alpha, beta and rho of the Weierstrass data.
struct HandleParams {
  double lambda = 0;
  double a = 0;
  double alpha = 0;
  double beta = 0;
  cplx rho{};

  /// w(a) on the sheet used to normalise rho: the principal root of (a-lambda)(a^2+1).
  static cplx w_at_a(double lambda, double a) {
    const double P = (a - lambda) * (a * a + 1);
    return P >= 0 ? cplx{std::sqrt(P), 0.0} : cplx{0.0, std::sqrt(-P)};
  }
  static cplx rho_for(double lambda, double a, double alpha, double beta) {
    return w_at_a(lambda, a) / ((a - alpha) * (a - beta));
  }
  /// Parameters with rho computed so that dg/g has residue +1 at (a, w(a)).
  static HandleParams make(double lambda, double a, double alpha, double beta) {
    HandleParams p{lambda, a, alpha, beta, rho_for(lambda, a, alpha, beta)};
    p.validate();
    return p;
  }

  CurvePoint pole_plus() const { return {a, w_at_a(lambda, a)}; }
  CurvePoint pole_minus() const { return {a, -w_at_a(lambda, a)}; }

  void validate() const {
    for (double v : {lambda, a, alpha, beta})
      if (!std::isfinite(v)) throw Error(ErrorKind::invalid_params, "parameters must be finite");
    if (std::abs(a - alpha) < 1e-14 || std::abs(a - beta) < 1e-14)
      throw Error(ErrorKind::invalid_params, "a must differ from alpha and beta");
    if (std::abs(a - lambda) < 1e-14) throw Error(ErrorKind::invalid_params, "a must differ from lambda");
    const cplx expect = rho_for(lambda, a, alpha, beta);
    if (!(std::abs(rho - expect) <= 1e-12 * std::abs(expect)))
      throw Error(ErrorKind::invalid_params, "rho does not match its normalisation");
  }
};

/// dg/g = rho (z - alpha)(z - beta)/(z - a) dz/w.
inline RationalForm make_dg_over_g(const HandleParams& p) {
  p.validate();
  return {Polynomial::from_roots({p.alpha, p.beta}), Polynomial{-p.a, 1.0}, true, p.rho};
}

/// dh = (z - a) dz/w, up to the fixed phase dh_phase.
inline RationalForm make_dh(const HandleParams& p) {
  p.validate();
  return {Polynomial{-p.a, 1.0}, Polynomial{1.0}, true, dh_phase};
}

/// Throws path-too-close if the path comes within delta_path of a pole of the form.
inline void check_pole_clearance(const RationalForm& f, const Path& path) {
  const auto poles = f.poles();
  for (const auto& seg : path)
    for (cplx q : poles)
      if (seg.clearance(q) < delta_path) throw Error(ErrorKind::path_too_close, "path passes near a pole of the form");
}

/// Integrates several forms along one path in a single adaptive pass.
template <std::size_t N>
CVec<N> integrate_forms(const std::array<RationalForm, N>& forms, const Path& path, const QuadratureOptions& opt = {}) {
  for (const auto& f : forms) check_pole_clearance(f, path);
  CVec<N> total{};
  for (const auto& seg : path) {
    const auto v = integrate_unit<N>(
        [&](double s) {
          const PathSample p = seg.sample(s);
          CVec<N> r;
          for (std::size_t k = 0; k < N; ++k) r[k] = forms[k].per_ds(p);
          return r;
        },
        opt);
    for (std::size_t k = 0; k < N; ++k) total[k] += v[k];
  }
  return total;
}

inline cplx integrate_path(const RationalForm& f, const Path& path, const QuadratureOptions& opt = {}) {
  return integrate_forms<1>({f}, path, opt)[0];
}

/// Integral over a loop in the plane where no lift is needed (forms without 1/w).
template <class ZOf, class DzOf>
cplx integrate_plane(const RationalForm& f, const ZOf& z_of, const DzOf& dz_of, const QuadratureOptions& opt = {}) {
  if (f.over_w) throw Error(ErrorKind::invalid_params, "plane integration needs a form without 1/w");
  return integrate_unit_scalar([&](double s) { return f.coefficient(z_of(s)) * dz_of(s); }, opt);
}

/// (1/2 pi i) times the integral over a small lifted circle around the point.
/// The radius starts at 1e-2 and is halved up to five times to clear other
/// poles and branch points.
inline cplx residue(const RationalForm& f, const CurvePoint& at, const CurveEquation& eq,
                    const QuadratureOptions& opt = {}) {
  std::vector<cplx> obstacles;
  for (cplx q : f.poles())
    if (std::abs(q - at.z) > 1e-12) obstacles.push_back(q);
  if (f.over_w)
    for (cplx b : eq.branch_points()) {
      if (std::abs(b - at.z) <= 1e-12) throw Error(ErrorKind::bad_contour, "pole sits on a branch point");
      obstacles.push_back(b);
    }
  double r = 1e-2;
  for (int shrink = 0;; ++shrink) {
    bool clear = true;
    for (cplx q : obstacles)
      if (std::abs(q - at.z) < r + delta_path) clear = false;
    if (clear) break;
    if (shrink == 5) throw Error(ErrorKind::bad_contour, "no isolating circle around the pole");
    r *= 0.5;
  }
  const cplx z0 = at.z + r;
  if (!f.over_w) {
    const cplx v = integrate_unit_scalar(
        [&](double s) {
          const cplx e = std::polar(r, 2 * pi * s);
          return f.coefficient(at.z + e) * (2 * pi * I * e);
        },
        opt);
    return v / (2 * pi * I);
  }
  if (!eq.contains(at)) throw Error(ErrorKind::invalid_params, "point is not on the curve");
  const cplx w0 = at.w * std::sqrt(eq.P(z0) / eq.P(at.z));
  const Path circle{LiftedSegment::arc(eq, at.z, r, 0.0, 2 * pi, w0)};
  return integrate_path(f, circle, opt) / (2 * pi * I);
}

/// Laurent coefficient c_k of the form in the end parameter t (form = sum c_k t^k dt),
/// by quadrature over |t| = r.
inline cplx laurent_at_end(const RationalForm& f, const CurveEquation& eq, int k, double r = 0.5,
                           const QuadratureOptions& opt = {}) {
  const EndChart chart{eq};
  auto integrand = [&](double s) {
    const cplx t = std::polar(r, 2 * pi * s);
    const cplx z = 1.0 / (t * t);
    const cplx dt_ds = 2 * pi * I * t;
    const cplx per_dt = f.coefficient(z) * (f.over_w ? chart.dz_over_w_dt(t) : chart.dz_dt(t));
    return per_dt * std::pow(t, -(k + 1)) * dt_ds;
  };
  // Vanishing coefficients are only resolvable relative to the integrand size.
  double size = 0;
  for (int j = 0; j < 16; ++j) size = std::max(size, std::abs(integrand(j / 16.0)));
  QuadratureOptions o = opt;
  o.abs_tol = std::max(o.abs_tol, 1e-15 * size);
  const cplx v = integrate_unit_scalar(integrand, o);
  return v / (2 * pi * I);
}

inline cplx residue_at_end(const RationalForm& f, const CurveEquation& eq, double r = 0.5) {
  return laurent_at_end(f, eq, -1, r);
}

/// Order of the form at the end: negative for a pole, positive for a zero.
inline int order_at_end(const RationalForm& f, const CurveEquation& eq, int search = 12) {
  std::vector<double> mag;
  double big = 0;
  for (int k = -search; k <= search; ++k) {
    mag.push_back(std::abs(laurent_at_end(f, eq, k)));
    big = std::max(big, mag.back() * std::pow(0.5, k));
  }
  for (int k = -search; k <= search; ++k)
    if (mag[k + search] * std::pow(0.5, k) > 1e-9 * big) return k;
  return search + 1;
}

/// Number of zeros of the form on the compact curve, with multiplicity.
/// Each finite zero of R away from the branch points gives two points; a
/// simple zero at a branch point is a double zero in the local parameter.
inline int zero_count(const RationalForm& f, const CurveEquation& eq) {
  int n = 0;
  for (cplx q : f.zeros()) {
    bool cancelled = false;
    for (cplx p : f.poles())
      if (std::abs(p - q) < 1e-10) cancelled = true;
    if (!cancelled) n += 2;
  }
  if (!f.over_w) throw Error(ErrorKind::invalid_params, "zero count is defined for forms over w");
  const int end = order_at_end(f, eq);
  return n + std::max(end, 0);
}

/// Number of poles with multiplicity, including the end.
inline int pole_count(const RationalForm& f, const CurveEquation& eq) {
  if (!f.over_w) throw Error(ErrorKind::invalid_params, "pole count is defined for forms over w");
  int n = 0;
  // Away from a branch point a pole of R lies on both sheets; at a branch
  // point it is a single pole of order two in the local parameter.
  n += 2 * static_cast<int>(f.poles().size());
  const int end = order_at_end(f, eq);
  return n + std::max(-end, 0);
}

}  // namespace he1
