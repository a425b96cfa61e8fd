/// Coupled integration of log g and the three Weierstrass coordinate forms
///   Phi = ( (1/g - g) dh / 2, i (1/g + g) dh / 2, dh )
/// along a path, with one shared adaptive step control.
#pragma once

#include <array>
#include <memory>
#include <vector>

#include "curve.hpp"
#include "forms.hpp"
#include "quadrature.hpp"

namespace he1 {

struct WeierstrassState {
  cplx log_g{};
  std::array<cplx, 3> phi{};
  cplx u{};  ///< accumulated dz/w (or dz on the plane)
};

struct CoupledOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-13;
  int max_depth = 48;
  int nodes = 10;
};

/// Weierstrass data given by the forms dg/g and dh on the curve.
struct CurveData {
  RationalForm dgg;
  RationalForm dh;
  cplx dlog_g(const PathSample& p) const { return dgg.per_ds(p); }
  cplx dh_ds(const PathSample& p) const { return dh.per_ds(p); }
};

inline CurveData curve_data(const HandleParams& p) { return {make_dg_over_g(p), make_dh(p)}; }

namespace detail {

struct GaussRule {
  std::vector<double> x, w;
  explicit GaussRule(int n) { gauss_legendre_unit(n, x, w); }
};

inline const GaussRule& gauss_rule(int n) {
  static thread_local std::vector<std::unique_ptr<GaussRule>> cache(64);
  if (n <= 0 || n >= 64) throw Error(ErrorKind::invalid_params, "bad node count");
  if (!cache[n]) cache[n] = std::make_unique<GaussRule>(n);
  return *cache[n];
}

inline std::array<cplx, 3> phi_integrand(cplx log_g, cplx dh) {
  const cplx g = std::exp(log_g), gi = std::exp(-log_g);
  return {0.5 * (gi - g) * dh, 0.5 * I * (gi + g) * dh, dh};
}

/// Increment over [s0, s1] from one Gauss panel. log g at each node comes
/// from its own Gauss sum of dg/g over [s0, node].
template <class Seg, class Data>
WeierstrassState panel(const Seg& seg, const Data& data, double s0, double s1, cplx L0, const GaussRule& rule) {
  const double h = s1 - s0;
  const int n = static_cast<int>(rule.x.size());
  WeierstrassState d;
  for (int j = 0; j < n; ++j) {
    const double sj = s0 + h * rule.x[j];
    cplx Lj = 0;
    for (int k = 0; k < n; ++k) Lj += rule.w[k] * data.dlog_g(seg.sample(s0 + h * rule.x[j] * rule.x[k]));
    Lj = L0 + h * rule.x[j] * Lj;
    const PathSample p = seg.sample(sj);
    const auto f = phi_integrand(Lj, data.dh_ds(p));
    d.log_g += h * rule.w[j] * data.dlog_g(p);
    for (int c = 0; c < 3; ++c) d.phi[c] += h * rule.w[j] * f[c];
    d.u += h * rule.w[j] * p.du_ds;
  }
  return d;
}

inline double state_gap(const WeierstrassState& a, const WeierstrassState& b) {
  double m = std::abs(a.log_g - b.log_g);
  for (int c = 0; c < 3; ++c) m = std::max(m, std::abs(a.phi[c] - b.phi[c]));
  return m;
}
inline double state_size(const WeierstrassState& a) {
  double m = std::abs(a.log_g);
  for (int c = 0; c < 3; ++c) m = std::max(m, std::abs(a.phi[c]));
  return m;
}
inline WeierstrassState add(WeierstrassState a, const WeierstrassState& b) {
  a.log_g += b.log_g;
  for (int c = 0; c < 3; ++c) a.phi[c] += b.phi[c];
  a.u += b.u;
  return a;
}

template <class Seg, class Data>
WeierstrassState adapt(const Seg& seg, const Data& data, double s0, double s1, cplx L0, const WeierstrassState& whole,
                       const CoupledOptions& opt, const GaussRule& rule, int depth) {
  const double m = 0.5 * (s0 + s1);
  const auto left = panel(seg, data, s0, m, L0, rule);
  const auto right = panel(seg, data, m, s1, L0 + left.log_g, rule);
  const auto both = add(left, right);
  const double err = state_gap(whole, both);
  if (err <= opt.abs_tol + opt.rel_tol * std::max(1.0, state_size(both))) return both;
  if (depth >= opt.max_depth)
    throw QuadratureError("coupled integration did not converge", both.phi[0], err);
  const auto l = adapt(seg, data, s0, m, L0, left, opt, rule, depth + 1);
  const auto r = adapt(seg, data, m, s1, L0 + l.log_g, right, opt, rule, depth + 1);
  return add(l, r);
}

}  // namespace detail

/// Advances the state along one segment. Seg needs sample(double) -> PathSample;
/// Data needs dlog_g(PathSample) and dh_ds(PathSample), both per unit parameter.
template <class Seg, class Data>
WeierstrassState integrate_weierstrass(const Seg& seg, const Data& data, const WeierstrassState& start,
                                       const CoupledOptions& opt = {}) {
  const auto& rule = detail::gauss_rule(opt.nodes);
  const auto whole = detail::panel(seg, data, 0.0, 1.0, start.log_g, rule);
  return detail::add(start, detail::adapt(seg, data, 0.0, 1.0, start.log_g, whole, opt, rule, 0));
}

template <class Seg, class Data>
WeierstrassState integrate_weierstrass(const std::vector<Seg>& path, const Data& data, WeierstrassState state,
                                       const CoupledOptions& opt = {}) {
  for (const auto& seg : path) state = integrate_weierstrass(seg, data, state, opt);
  return state;
}

inline Vec3 real_part(const std::array<cplx, 3>& v) { return {v[0].real(), v[1].real(), v[2].real()}; }
inline Vec3 imag_part(const std::array<cplx, 3>& v) { return {v[0].imag(), v[1].imag(), v[2].imag()}; }

}  // namespace he1
