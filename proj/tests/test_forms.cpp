#include <gtest/gtest.h>

#include "support.hpp"

using namespace he1;

namespace {

const HandleParams& sample_params() {
  static const HandleParams p = HandleParams::make(0.32, -0.35, -1.2, 0.95);
  return p;
}

/// Random form R(z) dz/w with poles kept away from the curve's cycles.
RationalForm random_form(test::Gen& gen) {
  RationalForm f;
  std::vector<cplx> num;
  for (int k = gen.integer(0, 2); k > 0; --k) num.push_back(gen.complex_in(-1, 1, -1, 1));
  f.numerator = Polynomial::from_roots(num);
  f.denominator = Polynomial::from_roots({gen.complex_in(2.5, 3.5, -1, 1)});
  f.scale = gen.complex_in(-1, 1, -1, 1);
  return f;
}

}  // namespace

TEST(Forms, DgOverGVanishesAtAlphaAndBeta) {
  const auto& p = sample_params();
  const auto f = make_dg_over_g(p);
  const HCurve c(p.lambda);
  for (double z : {p.alpha, p.beta})
    for (int sheet : {1, -1}) EXPECT_EQ(std::abs(f.at(c.point(z, sheet))), 0.0);
  EXPECT_EQ(f.numerator.degree(), 2);
  EXPECT_EQ(f.denominator.degree(), 1);
  EXPECT_TRUE(f.over_w);
  EXPECT_TRUE(f.is_reduced());
}

TEST(Forms, HeightFormVanishesAtA) {
  const auto& p = sample_params();
  const auto f = make_dh(p);
  const HCurve c(p.lambda);
  for (int sheet : {1, -1}) EXPECT_EQ(std::abs(f.at(c.point(p.a, sheet))), 0.0);
}

TEST(Forms, InvalidParametersAreRejected) {
  EXPECT_THROW(HandleParams::make(0.32, 0.32, -1, 1), Error);
  EXPECT_THROW(HandleParams::make(0.32, -1, -1, 1), Error);
  HandleParams bad = sample_params();
  bad.rho *= 2.0;
  try {
    make_dg_over_g(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_params);
  }
}

TEST(Forms, RhoNormalisesResidueAtPositiveSheet) {
  const auto& p = sample_params();
  const cplx w = HandleParams::w_at_a(p.lambda, p.a);
  EXPECT_LT(std::abs(w * w - (p.a - p.lambda) * (p.a * p.a + 1)), 1e-15);
  EXPECT_LT(std::abs(p.rho * (p.a - p.alpha) * (p.a - p.beta) / w - 1.0), 1e-15);
}

TEST(Forms, EndBehaviour) {
  const auto& p = sample_params();
  const auto eq = HCurve(p.lambda).equation();
  EXPECT_EQ(order_at_end(make_dh(p), eq), -2);
  EXPECT_EQ(order_at_end(make_dg_over_g(p), eq), -2);
  EXPECT_EQ(order_at_end(dz_over_w(), eq), 0);
  EXPECT_EQ(zero_count(make_dh(p), eq), 2);
  EXPECT_EQ(zero_count(dz_over_w(), eq), 0);
  // Degree of a meromorphic form on a torus is zero.
  const auto dgg = make_dg_over_g(p);
  EXPECT_EQ(zero_count(dgg, eq) - pole_count(dgg, eq), 0);
}

TEST(Forms, ClassicalResidueOnUnitCircle) {
  const RationalForm dz_over_z{Polynomial{1.0}, Polynomial{0.0, 1.0}, false, 1.0};
  const cplx v = integrate_plane(
      dz_over_z, [](double s) { return std::polar(1.0, 2 * pi * s); },
      [](double s) { return 2 * pi * I * std::polar(1.0, 2 * pi * s); });
  EXPECT_LT(std::abs(v - 2 * pi * I), 1e-12);
  EXPECT_LT(std::abs(residue(dz_over_z, {0.0, 0.0}, HCurve(0.32).equation()) - 1.0), 1e-12);
}

TEST(Forms, HolomorphicOnContractibleLoop) {
  const auto& p = sample_params();
  const HCurve c(p.lambda);
  const auto w0 = c.point(2.5).w;
  const Path loop{LiftedSegment::arc(c.equation(), 2.0, 0.5, 0.0, 2 * pi, w0)};
  EXPECT_LT(std::abs(integrate_path(make_dh(p), loop)), 1e-11);
}

TEST(Forms, SelfConvergenceOverCycleA) {
  const auto& p = sample_params();
  const HCurve c(p.lambda);
  QuadratureOptions fine;
  fine.rel_tol = 1e-14;
  for (const auto& f : {make_dh(p), make_dg_over_g(p), dz_over_w()}) {
    const cplx coarse = integrate_path(f, c.cycle_a().segments), refined = integrate_path(f, c.cycle_a().segments, fine);
    EXPECT_LT(std::abs(coarse - refined), 1e-10);
  }
}

TEST(Forms, PathTooCloseToPole) {
  const auto& p = sample_params();
  const HCurve c(p.lambda);
  const auto path = lift_polyline(c, c.point(p.a - 0.5 + 1e-4 * I), {p.a + 0.5 + 1e-4 * I});
  try {
    integrate_path(make_dg_over_g(p), path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::path_too_close);
  }
}

TEST(Forms, Linearity) {
  test::Gen gen(31);
  const HCurve c(0.4);
  for (int k = 0; k < 20; ++k) {
    const auto f1 = random_form(gen), f2 = random_form(gen);
    const cplx c1 = gen.complex_in(-2, 2, -2, 2), c2 = gen.complex_in(-2, 2, -2, 2);
    const auto& path = c.cycle_b().segments;
    const cplx lhs = integrate_path(c1 * f1 + c2 * f2, path);
    const cplx rhs = c1 * integrate_path(f1, path) + c2 * integrate_path(f2, path);
    EXPECT_LT(std::abs(lhs - rhs), 1e-11 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(Forms, ReversedPathNegates) {
  test::Gen gen(32);
  const HCurve c(0.4);
  for (int k = 0; k < 20; ++k) {
    const auto f = random_form(gen);
    const cplx z = gen.complex_away(2, {0.4, I, -I}, 0.2);
    const auto path = lift_polyline(c, c.point(-2.0 + 2.0 * I), {z});
    const cplx fwd = integrate_path(f, path), back = integrate_path(f, reversed(path));
    EXPECT_LT(std::abs(fwd + back), 1e-12 * std::max(1.0, std::abs(fwd)));
  }
}

TEST(Forms, ConjugationRealityOnCycleA) {
  // Real coefficients: the A-period sits on one axis, the B and mirrored-B
  // periods are conjugate up to sign.
  test::Gen gen(33);
  for (int k = 0; k < 15; ++k) {
    const HCurve c(gen.uniform(0.1, 0.9));
    RationalForm f;
    f.numerator = Polynomial{gen.uniform(-1, 1), gen.uniform(-1, 1)};
    f.denominator = Polynomial{-gen.uniform(-3, -2), 1.0};
    const cplx pa = integrate_path(f, c.cycle_a().segments);
    EXPECT_LT(std::min(std::abs(pa.real()), std::abs(pa.imag())), 1e-9 * std::max(1.0, std::abs(pa)));
    const cplx pb = integrate_path(f, c.cycle_b().segments), pbb = integrate_path(f, c.cycle_b_conjugate().segments);
    EXPECT_LT(std::min(std::abs(pbb - std::conj(pb)), std::abs(pbb + std::conj(pb))), 1e-9 * std::abs(pb));
  }
}

TEST(Forms, ResiduesOfDgOverGAtSolution) {
  const auto& p = test::solved().params;
  const auto eq = HCurve(p.lambda).equation();
  const auto f = make_dg_over_g(p);
  const cplx rp = residue(f, p.pole_plus(), eq), rm = residue(f, p.pole_minus(), eq);
  EXPECT_LT(std::abs(rp - 1.0), 1e-10);
  EXPECT_LT(std::abs(rm + 1.0), 1e-10);
  EXPECT_LT(std::abs(rp + rm + residue_at_end(f, eq)), 1e-9);
  EXPECT_LT(std::abs(residue_at_end(f, eq)), 1e-9);
}

TEST(Forms, ResidueOnBranchPointIsABadContour) {
  const RationalForm f{Polynomial{1.0}, Polynomial{-0.32, 1.0}, true, 1.0};
  try {
    residue(f, {0.32, 0.0}, HCurve(0.32).equation());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::bad_contour);
  }
}
