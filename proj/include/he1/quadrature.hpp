/// Globally adaptive Gauss-Kronrod (7/15) quadrature on [0,1] for vectors of complex values.
#pragma once

#include <array>
#include <algorithm>
#include <vector>

#include "core.hpp"

namespace he1 {

struct QuadratureOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  int max_subdivisions = 4000;
};

template <std::size_t N>
using CVec = std::array<cplx, N>;

template <std::size_t N>
double max_abs(const CVec<N>& v) {
  double m = 0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

namespace detail {

inline constexpr std::array<double, 8> kx = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kw = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd Kronrod nodes kx[1], kx[3], kx[5], kx[7].
inline constexpr std::array<double, 4> gw = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <std::size_t N>
struct Panel {
  double a, b;
  CVec<N> value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <std::size_t N, class F>
Panel<N> gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  CVec<N> kr{}, ga{};
  auto acc = [](CVec<N>& dst, const CVec<N>& v, double w) {
    for (std::size_t i = 0; i < N; ++i) dst[i] += w * v[i];
  };
  const CVec<N> fc = f(c);
  acc(kr, fc, kw[7]);
  acc(ga, fc, gw[3]);
  for (int k = 0; k < 7; ++k) {
    const CVec<N> f1 = f(c - h * kx[k]);
    const CVec<N> f2 = f(c + h * kx[k]);
    acc(kr, f1, kw[k]);
    acc(kr, f2, kw[k]);
    if (k % 2 == 1) {
      acc(ga, f1, gw[k / 2]);
      acc(ga, f2, gw[k / 2]);
    }
  }
  Panel<N> p{a, b, {}, 0.0};
  for (std::size_t i = 0; i < N; ++i) {
    p.value[i] = h * kr[i];
    p.error = std::max(p.error, std::abs(h * (kr[i] - ga[i])));
  }
  return p;
}

}  // namespace detail

/// Integrates f over [0,1]. f maps a double to CVec<N>. Deterministic: the
/// subdivision sequence depends only on f and the options.
template <std::size_t N, class F>
CVec<N> integrate_unit(const F& f, const QuadratureOptions& opt = {}, double* error_out = nullptr) {
  std::vector<detail::Panel<N>> heap;
  const int initial = 4;
  for (int k = 0; k < initial; ++k)
    heap.push_back(detail::gk15<N>(f, static_cast<double>(k) / initial, static_cast<double>(k + 1) / initial));
  std::make_heap(heap.begin(), heap.end());
  for (int iter = 0;; ++iter) {
    CVec<N> total{};
    double err = 0;
    for (const auto& p : heap) {
      for (std::size_t i = 0; i < N; ++i) total[i] += p.value[i];
      err += p.error;
    }
    if (err <= std::max(opt.abs_tol, opt.rel_tol * max_abs<N>(total))) {
      if (error_out) *error_out = err;
      return total;
    }
    if (iter >= opt.max_subdivisions) {
      throw QuadratureError("tolerance not met after " + std::to_string(iter) + " subdivisions",
                            total[0], err);
    }
    std::pop_heap(heap.begin(), heap.end());
    const auto worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b))
      throw QuadratureError("interval collapsed", total[0], err);
    heap.push_back(detail::gk15<N>(f, worst.a, mid));
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(detail::gk15<N>(f, mid, worst.b));
    std::push_heap(heap.begin(), heap.end());
  }
}

/// Scalar convenience wrapper.
template <class F>
cplx integrate_unit_scalar(const F& f, const QuadratureOptions& opt = {}, double* error_out = nullptr) {
  return integrate_unit<1>([&](double s) { return CVec<1>{f(s)}; }, opt, error_out)[0];
}

/// Gauss-Legendre nodes and weights on [0,1] by Newton on the Legendre recurrence.
inline void gauss_legendre_unit(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = n * (t * p1 - p0) / (t * t - 1);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    x[i] = 0.5 * (1 - t);
    w[i] = 1.0 / ((1 - t * t) * dp * dp);
  }
}

}  // namespace he1
