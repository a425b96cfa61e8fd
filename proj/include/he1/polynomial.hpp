/// Dense complex polynomials in z, stored lowest degree first.
#pragma once

#include <algorithm>
#include <vector>

#include "core.hpp"

namespace he1 {

struct Polynomial {
  std::vector<cplx> c;  ///< c[k] multiplies z^k

  Polynomial() = default;
  Polynomial(std::initializer_list<cplx> coeffs) : c(coeffs) {}
  explicit Polynomial(std::vector<cplx> coeffs) : c(std::move(coeffs)) {}

  /// Monic product of linear factors (z - r_k).
  static Polynomial from_roots(const std::vector<cplx>& roots) {
    Polynomial p{1.0};
    for (cplx r : roots) p = p * Polynomial{-r, 1.0};
    return p;
  }

  int degree() const {
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k)
      if (c[k] != cplx{}) return k;
    return -1;
  }
  bool is_zero() const { return degree() < 0; }

  cplx operator()(cplx z) const {
    cplx acc{};
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  Polynomial derivative() const {
    if (c.size() < 2) return Polynomial{0.0};
    std::vector<cplx> d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = static_cast<double>(k) * c[k];
    return Polynomial(std::move(d));
  }

  friend Polynomial operator*(const Polynomial& p, const Polynomial& q) {
    if (p.c.empty() || q.c.empty()) return Polynomial{0.0};
    std::vector<cplx> r(p.c.size() + q.c.size() - 1);
    for (std::size_t i = 0; i < p.c.size(); ++i)
      for (std::size_t j = 0; j < q.c.size(); ++j) r[i + j] += p.c[i] * q.c[j];
    return Polynomial(std::move(r));
  }
  friend Polynomial operator*(cplx s, const Polynomial& p) {
    Polynomial r = p;
    for (auto& x : r.c) x *= s;
    return r;
  }
  friend Polynomial operator+(const Polynomial& p, const Polynomial& q) {
    std::vector<cplx> r(std::max(p.c.size(), q.c.size()));
    for (std::size_t i = 0; i < p.c.size(); ++i) r[i] += p.c[i];
    for (std::size_t i = 0; i < q.c.size(); ++i) r[i] += q.c[i];
    return Polynomial(std::move(r));
  }

  /// All complex roots by Aberth iteration, polished by Newton.
  std::vector<cplx> roots() const {
    const int n = degree();
    if (n <= 0) return {};
    const cplx lead = c[n];
    if (n == 1) return {-c[0] / lead};
    double bound = 0;
    for (int k = 0; k < n; ++k) bound = std::max(bound, std::abs(c[k] / lead));
    bound = 1.0 + bound;
    std::vector<cplx> r(n);
    for (int k = 0; k < n; ++k) r[k] = 0.5 * bound * std::polar(1.0, 2 * pi * (k + 0.25) / n);
    const Polynomial dp = derivative();
    for (int it = 0; it < 500; ++it) {
      double move = 0;
      for (int k = 0; k < n; ++k) {
        const cplx ratio = (*this)(r[k]) / dp(r[k]);
        cplx rep{};
        for (int j = 0; j < n; ++j)
          if (j != k) rep += 1.0 / (r[k] - r[j]);
        const cplx step = ratio / (1.0 - ratio * rep);
        if (std::isfinite(std::abs(step))) {
          r[k] -= step;
          move = std::max(move, std::abs(step) / (1.0 + std::abs(r[k])));
        }
      }
      if (move < 1e-15) break;
    }
    return r;
  }
};

}  // namespace he1
