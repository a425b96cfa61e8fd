/// The period problem: alpha and beta from the dg/g cycle conditions, a from
/// the height periods, and a last scalar root in lambda.
#pragma once

#include <boost/math/tools/toms748_solve.hpp>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "curve.hpp"
#include "forms.hpp"
#include "weierstrass.hpp"

namespace he1 {

/// Integers n with  int dg/g = 2 pi i n  over the cycles A and B.
struct IntegerTargets {
  int n_a = 0;
  int n_b = 0;
  bool operator==(const IntegerTargets&) const = default;
};

enum class CycleId { a = 0, b = 1 };

/// Which real coordinate period fixes a and which one is left as the lambda residual.
/// Component 0, 1, 2 is x1, x2, x3. The defaults are the outcome of
/// diagnose_partition and are checked against it in the tests.
struct Partition {
  CycleId a_cycle = CycleId::b;
  int a_component = 2;
  CycleId lambda_cycle = CycleId::b;
  int lambda_component = 1;
};

/// Targets that carry the embedded surface with the basis of HCurve.
inline constexpr IntegerTargets default_targets{0, 1};

struct SolverOptions {
  QuadratureOptions quad{};
  CoupledOptions coupled{};
  double alpha_beta_tol = 1e-9;
  int newton_max = 50;
  double fd_step = 1e-6;
  int a_samples = 200;
  double a_lo = -20.0;
  double a_gap = 0.01;  ///< scan stops this far below lambda
  double bisect_width = 1e-4;
  double residual_tol = 1e-8;
  int secant_max = 60;
  Partition partition{};
};

struct PeriodReport {
  std::array<cplx, 2> dgg_periods{};                   ///< over A, B
  std::array<std::array<cplx, 3>, 2> coord_periods{};  ///< [cycle][component]
  std::array<cplx, 2> residues{};                      ///< at (a, +w(a)), (a, -w(a))
  double defect = 0;
  IntegerTargets targets{};
};

struct Solution {
  HandleParams params;
  PeriodReport report;
};

inline const Cycle& cycle_of(const HCurve& c, CycleId id) { return id == CycleId::a ? c.cycle_a() : c.cycle_b(); }

/// Path from the base point (lambda, 0) to the start of the given cycle.
inline Path path_to_cycle_start(const HCurve& c, CycleId id) {
  if (id == CycleId::b) return {};
  return lift_polyline(c, c.base(), {-I});
}

namespace detail {

inline Error staged(const char* stage, const Error& e) { return Error(e.kind(), std::string(stage) + ": " + e.what()); }

/// Periods of dz/w and z dz/w over A and B; these fix everything that is linear in a.
struct LinearPeriods {
  std::array<cplx, 2> j0{}, j1{};
};

inline LinearPeriods linear_periods(const HCurve& c, const QuadratureOptions& opt) {
  const RationalForm one{}, zed{Polynomial{0.0, 1.0}, Polynomial{1.0}, true, 1.0};
  LinearPeriods lp;
  for (int k = 0; k < 2; ++k) {
    const auto v = integrate_forms<2>({one, zed}, cycle_of(c, static_cast<CycleId>(k)).segments, opt);
    lp.j0[k] = v[0];
    lp.j1[k] = v[1];
  }
  return lp;
}

/// Periods over A and B of dz/((z-a) w), the only a-dependent piece of dg/g.
inline std::array<cplx, 2> pole_periods(const HCurve& c, double a, const QuadratureOptions& opt) {
  const RationalForm f{Polynomial{1.0}, Polynomial{-a, 1.0}, true, 1.0};
  return {integrate_path(f, c.cycle_a().segments, opt), integrate_path(f, c.cycle_b().segments, opt)};
}

/// Cycle periods of dg/g from the split
///   rho (z-alpha)(z-beta)/(z-a) = w(a) [ (z-a)/P + s/P + 1/(z-a) ],
/// P = (a-alpha)(a-beta), s = 2a - alpha - beta.
inline std::array<cplx, 2> dgg_periods_split(const LinearPeriods& lp, const std::array<cplx, 2>& ia, double lambda,
                                             double a, double alpha, double beta) {
  const cplx wa = HandleParams::w_at_a(lambda, a);
  const double P = (a - alpha) * (a - beta), s = 2 * a - alpha - beta;
  std::array<cplx, 2> r;
  for (int k = 0; k < 2; ++k) r[k] = wa * ((lp.j1[k] - a * lp.j0[k]) / P + (s / P) * lp.j0[k] + ia[k]);
  return r;
}

inline std::array<double, 4> dgg_residual(const std::array<cplx, 2>& per, const IntegerTargets& t) {
  const cplx ra = per[0] - 2 * pi * I * static_cast<double>(t.n_a);
  const cplx rb = per[1] - 2 * pi * I * static_cast<double>(t.n_b);
  return {ra.real(), ra.imag(), rb.real(), rb.imag()};
}

inline double max_abs4(const std::array<double, 4>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace detail

/// Solves the two dg/g cycle conditions for (alpha, beta) at fixed (lambda, a).
///
/// The conditions are linear in p = 1/P and q = s/P, which gives the seed; a
/// Gauss-Newton iteration on (alpha, beta) with a finite-difference Jacobian
/// then polishes it. Returns alpha <= beta.
inline std::pair<double, double> solve_alpha_beta(double lambda, double a, const IntegerTargets& targets,
                                                  const SolverOptions& opt = {}) {
  if (std::abs(a - lambda) < 1e-12) throw Error(ErrorKind::invalid_params, "a must differ from lambda");
  const HCurve curve(lambda);
  const auto lp = detail::linear_periods(curve, opt.quad);
  const auto ia = detail::pole_periods(curve, a, opt.quad);
  const cplx wa = HandleParams::w_at_a(lambda, a);

  // w(a) [p (J1 - a J0) + q J0 + Ia] = 2 pi i n on both cycles, least squares in real p, q.
  std::array<std::array<double, 2>, 4> M{};
  std::array<double, 4> rhs{};
  const int n[2] = {targets.n_a, targets.n_b};
  for (int k = 0; k < 2; ++k) {
    const cplx c1 = wa * (lp.j1[k] - a * lp.j0[k]), c0 = wa * lp.j0[k];
    const cplx r = 2 * pi * I * static_cast<double>(n[k]) - wa * ia[k];
    M[2 * k] = {c1.real(), c0.real()};
    M[2 * k + 1] = {c1.imag(), c0.imag()};
    rhs[2 * k] = r.real();
    rhs[2 * k + 1] = r.imag();
  }
  double n00 = 0, n01 = 0, n11 = 0, b0 = 0, b1 = 0;
  for (int r = 0; r < 4; ++r) {
    n00 += M[r][0] * M[r][0];
    n01 += M[r][0] * M[r][1];
    n11 += M[r][1] * M[r][1];
    b0 += M[r][0] * rhs[r];
    b1 += M[r][1] * rhs[r];
  }
  const double det = n00 * n11 - n01 * n01;
  if (!(std::abs(det) > 1e-300)) throw Error(ErrorKind::no_root, "dg/g conditions are degenerate");
  const double p = (n11 * b0 - n01 * b1) / det, q = (n00 * b1 - n01 * b0) / det;
  if (!(std::abs(p) > 1e-14)) throw Error(ErrorKind::no_root, "dg/g conditions force alpha or beta to infinity");

  const double P = 1 / p, s = q / p;
  const double sum = 2 * a - s, prod = P - a * a + a * sum;
  const double disc = sum * sum - 4 * prod;
  if (disc < 0) {
    const double im = 0.5 * std::sqrt(-disc);
    if (im > 1e-8) {
      std::ostringstream os;
      os << "alpha and beta are complex (|Im| = " << im << ")";
      throw Error(ErrorKind::reality_violation, os.str());
    }
  }
  const double root = 0.5 * std::sqrt(std::max(disc, 0.0));
  double x[2] = {0.5 * sum - root, 0.5 * sum + root};

  auto F = [&](double al, double be) {
    return detail::dgg_residual(detail::dgg_periods_split(lp, ia, lambda, a, al, be), targets);
  };
  auto f = F(x[0], x[1]);
  for (int it = 0;; ++it) {
    if (detail::max_abs4(f) < opt.alpha_beta_tol * 1e-3 || (it > 0 && detail::max_abs4(f) < opt.alpha_beta_tol)) break;
    if (it >= opt.newton_max) {
      std::ostringstream os;
      os << "Newton on (alpha, beta) stalled, residual " << detail::max_abs4(f);
      throw Error(ErrorKind::no_root, os.str());
    }
    std::array<std::array<double, 2>, 4> J{};
    for (int v = 0; v < 2; ++v) {
      double y[2] = {x[0], x[1]};
      y[v] += opt.fd_step;
      const auto fp = F(y[0], y[1]);
      for (int r = 0; r < 4; ++r) J[r][v] = (fp[r] - f[r]) / opt.fd_step;
    }
    double a00 = 0, a01 = 0, a11 = 0, g0 = 0, g1 = 0;
    for (int r = 0; r < 4; ++r) {
      a00 += J[r][0] * J[r][0];
      a01 += J[r][0] * J[r][1];
      a11 += J[r][1] * J[r][1];
      g0 += J[r][0] * f[r];
      g1 += J[r][1] * f[r];
    }
    const double dj = a00 * a11 - a01 * a01;
    if (!(std::abs(dj) > 0)) throw Error(ErrorKind::no_root, "singular Jacobian for (alpha, beta)");
    x[0] -= (a11 * g0 - a01 * g1) / dj;
    x[1] -= (a00 * g1 - a01 * g0) / dj;
    f = F(x[0], x[1]);
  }
  if (!(detail::max_abs4(f) < opt.alpha_beta_tol)) throw Error(ErrorKind::no_root, "dg/g conditions not met");
  if (x[0] > x[1]) std::swap(x[0], x[1]);
  return {x[0], x[1]};
}

/// The real coordinate period used to fix a: it involves dh only, so it is
/// exactly linear in a.
inline double a_condition(double lambda, double a, const SolverOptions& opt = {}) {
  const HCurve curve(lambda);
  const auto lp = detail::linear_periods(curve, opt.quad);
  const int k = static_cast<int>(opt.partition.a_cycle);
  if (opt.partition.a_component != 2) throw Error(ErrorKind::invalid_params, "a-equation must be a height period");
  return (dh_phase * (lp.j1[k] - a * lp.j0[k])).real();
}

struct AScanTable {
  std::vector<double> a, value;
};

/// Solves the designated height period for a, then (alpha, beta).
inline std::array<double, 3> solve_a(double lambda, const IntegerTargets& targets, const SolverOptions& opt = {},
                                     AScanTable* table = nullptr) {
  const HCurve curve(lambda);
  const auto lp = detail::linear_periods(curve, opt.quad);
  const int k = static_cast<int>(opt.partition.a_cycle);
  auto f = [&](double a) { return (dh_phase * (lp.j1[k] - a * lp.j0[k])).real(); };
  const double hi = lambda - opt.a_gap, lo = opt.a_lo;
  AScanTable scan;
  for (int i = 0; i < opt.a_samples; ++i) {
    const double a = lo + (hi - lo) * i / (opt.a_samples - 1);
    scan.a.push_back(a);
    scan.value.push_back(f(a));
  }
  if (table) *table = scan;
  // Nearest sign change below lambda.
  for (int i = opt.a_samples - 1; i > 0; --i) {
    if (scan.value[i - 1] == 0) return {scan.a[i - 1], 0, 0};
    if ((scan.value[i - 1] < 0) != (scan.value[i] < 0)) {
      std::uintmax_t iters = 200;
      const auto r = boost::math::tools::toms748_solve(f, scan.a[i - 1], scan.a[i], scan.value[i - 1], scan.value[i],
                                                       boost::math::tools::eps_tolerance<double>(52), iters);
      const double a = 0.5 * (r.first + r.second);
      const auto [al, be] = solve_alpha_beta(lambda, a, targets, opt);
      return {a, al, be};
    }
  }
  std::ostringstream os;
  os << "no sign change of the a-equation on [" << lo << ", " << hi << "]:";
  for (int i = 0; i < opt.a_samples; i += opt.a_samples / 10) os << " (" << scan.a[i] << ", " << scan.value[i] << ")";
  throw Error(ErrorKind::no_root, os.str());
}

/// Coupled Weierstrass periods over A and B with g = 1 at the base point.
/// Returned as [cycle][component]; also returns the dg/g periods seen by log g.
inline std::array<std::array<cplx, 3>, 2> coordinate_periods(const HandleParams& p, const CoupledOptions& opt = {},
                                                            std::array<cplx, 2>* log_g_periods = nullptr) {
  const HCurve curve(p.lambda);
  const auto data = curve_data(p);
  std::array<std::array<cplx, 3>, 2> out{};
  for (int k = 0; k < 2; ++k) {
    const auto id = static_cast<CycleId>(k);
    check_pole_clearance(data.dgg, path_to_cycle_start(curve, id));
    check_pole_clearance(data.dgg, cycle_of(curve, id).segments);
    const auto s0 = integrate_weierstrass(path_to_cycle_start(curve, id), data, WeierstrassState{}, opt);
    const auto s1 = integrate_weierstrass(cycle_of(curve, id).segments, data, s0, opt);
    for (int c = 0; c < 3; ++c) out[k][c] = s1.phi[c] - s0.phi[c];
    if (log_g_periods) (*log_g_periods)[k] = s1.log_g - s0.log_g;
  }
  return out;
}

/// The last real condition, as a function of lambda alone.
inline double lambda_residual(double lambda, const IntegerTargets& targets, const SolverOptions& opt = {}) {
  std::array<double, 3> aab;
  try {
    aab = solve_a(lambda, targets, opt);
  } catch (const Error& e) {
    throw detail::staged("solve_a", e);
  }
  const auto params = HandleParams::make(lambda, aab[0], aab[1], aab[2]);
  const auto per = coordinate_periods(params, opt.coupled);
  return per[static_cast<int>(opt.partition.lambda_cycle)][opt.partition.lambda_component].real();
}

/// All conditions recomputed from scratch at the given parameters.
inline PeriodReport period_report(const HandleParams& p, const IntegerTargets& targets, const SolverOptions& opt = {}) {
  const HCurve curve(p.lambda);
  const auto dgg = make_dg_over_g(p);
  PeriodReport r;
  r.targets = targets;
  r.dgg_periods = {integrate_path(dgg, curve.cycle_a().segments, opt.quad),
                   integrate_path(dgg, curve.cycle_b().segments, opt.quad)};
  r.residues = {residue(dgg, p.pole_plus(), curve.equation(), opt.quad),
                residue(dgg, p.pole_minus(), curve.equation(), opt.quad)};
  r.coord_periods = coordinate_periods(p, opt.coupled);
  double d = 0;
  d = std::max(d, std::abs(r.dgg_periods[0] - 2 * pi * I * static_cast<double>(targets.n_a)));
  d = std::max(d, std::abs(r.dgg_periods[1] - 2 * pi * I * static_cast<double>(targets.n_b)));
  d = std::max(d, std::abs(r.residues[0] - 1.0));
  d = std::max(d, std::abs(r.residues[1] + 1.0));
  for (const auto& row : r.coord_periods)
    for (const auto& v : row) d = std::max(d, std::abs(v.real()));
  r.defect = d;
  return r;
}

/// Bisection down to opt.bisect_width, then secant until |residual| < opt.residual_tol.
inline Solution solve_full(const IntegerTargets& targets, double lo, double hi, const SolverOptions& opt = {},
                           std::function<void(double, double)> trace = {}) {
  if (!(lo < hi)) throw Error(ErrorKind::invalid_params, "empty bracket");
  auto R = [&](double l) {
    const double v = lambda_residual(l, targets, opt);
    if (trace) trace(l, v);
    return v;
  };
  double flo = R(lo), fhi = R(hi);
  if ((flo < 0) == (fhi < 0)) {
    std::ostringstream os;
    os << "no sign change of the lambda residual on [" << lo << ", " << hi << "] (" << flo << ", " << fhi << ")";
    throw Error(ErrorKind::no_root, os.str());
  }
  while (hi - lo > opt.bisect_width) {
    const double m = 0.5 * (lo + hi), fm = R(m);
    if ((fm < 0) == (flo < 0)) {
      lo = m;
      flo = fm;
    } else {
      hi = m;
      fhi = fm;
    }
  }
  double x0 = lo, f0 = flo, x1 = hi, f1 = fhi;
  if (std::abs(f0) < std::abs(f1)) {
    std::swap(x0, x1);
    std::swap(f0, f1);
  }
  for (int it = 0; std::abs(f1) >= opt.residual_tol; ++it) {
    if (it >= opt.secant_max) throw Error(ErrorKind::no_root, "secant iteration on lambda did not converge");
    double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    if (!(x2 > std::min(lo, hi) - 1e-3 && x2 < std::max(lo, hi) + 1e-3)) x2 = 0.5 * (x0 + x1);
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = R(x1);
  }
  Solution sol;
  try {
    const auto aab = solve_a(x1, targets, opt);
    sol.params = HandleParams::make(x1, aab[0], aab[1], aab[2]);
    sol.report = period_report(sol.params, targets, opt);
  } catch (const Error& e) {
    throw detail::staged("final report", e);
  }
  return sol;
}

/// The six real coordinate periods at one (lambda, a), with (alpha, beta) solved.
struct PartitionSample {
  double lambda = 0, a = 0;
  std::array<std::array<double, 3>, 2> re{};
};

struct PartitionDiagnostic {
  std::vector<PartitionSample> samples;
  /// identically_zero[cycle][component]
  std::array<std::array<bool, 3>, 2> identically_zero{};
  /// dependent[cycle][component]: a fixed multiple of the same component on the other cycle.
  std::array<std::array<bool, 3>, 2> dependent{};
  Partition partition{};
};

/// Evaluates all coordinate periods at a few (lambda, a) pairs. A period that
/// vanishes at every sample (below 1e-9) is identically zero; one that is a
/// fixed multiple of another across all samples adds no condition (the B
/// representative is kept). The surviving height period fixes a and the
/// surviving other period is the lambda residual.
inline PartitionDiagnostic diagnose_partition(const IntegerTargets& targets, const std::vector<double>& lambdas,
                                              const std::vector<double>& a_offsets, const SolverOptions& opt = {}) {
  PartitionDiagnostic d;
  for (auto& row : d.identically_zero) row.fill(true);
  for (double l : lambdas)
    for (double off : a_offsets) {
      const double a = l - off;
      const auto [al, be] = solve_alpha_beta(l, a, targets, opt);
      const auto per = coordinate_periods(HandleParams::make(l, a, al, be), opt.coupled);
      PartitionSample s{l, a, {}};
      for (int k = 0; k < 2; ++k)
        for (int c = 0; c < 3; ++c) {
          s.re[k][c] = per[k][c].real();
          if (std::abs(s.re[k][c]) >= 1e-9) d.identically_zero[k][c] = false;
        }
      d.samples.push_back(s);
    }
  for (int c = 0; c < 3; ++c) {
    if (d.identically_zero[0][c] || d.identically_zero[1][c]) continue;
    double aa = 0, bb = 0, ab = 0;
    for (const auto& s : d.samples) {
      aa += s.re[0][c] * s.re[0][c];
      bb += s.re[1][c] * s.re[1][c];
      ab += s.re[0][c] * s.re[1][c];
    }
    if (std::abs(ab) >= (1 - 1e-9) * std::sqrt(aa * bb)) d.dependent[0][c] = true;
  }
  std::vector<std::pair<int, int>> height, other;
  for (int k = 0; k < 2; ++k)
    for (int c = 0; c < 3; ++c)
      if (!d.identically_zero[k][c] && !d.dependent[k][c]) (c == 2 ? height : other).push_back({k, c});
  if (height.size() != 1 || other.size() != 1)
    throw Error(ErrorKind::no_root, "unexpected number of independent coordinate periods");
  d.partition = {static_cast<CycleId>(height[0].first), 2, static_cast<CycleId>(other[0].first), other[0].second};
  return d;
}

}  // namespace he1
