#include <gtest/gtest.h>

#include "support.hpp"

using namespace he1;

TEST(Helicoid, ClosedFormValues) {
  EXPECT_EQ(norm(helicoid_closed(0.0)), 0.0);
  EXPECT_LT(test::dist(helicoid_closed(I * (pi / 2)), {0, 0, -pi / 2}), 1e-15);
  EXPECT_LT(test::dist(helicoid_closed(1.0), {0, -std::sinh(1.0), 0}), 1e-15);
  EXPECT_NEAR(helicoid_closed(1.0)[1], -1.1752011936438014, 1e-15);
}

TEST(Helicoid, WeierstrassMatchesClosedForm) {
  EXPECT_EQ(norm(helicoid_weierstrass(0.0)), 0.0);
  EXPECT_LT(test::dist(helicoid_weierstrass(1.0 + I), helicoid_closed(1.0 + I)), 1e-9);
}

TEST(Helicoid, PathIndependenceInThePlane) {
  const auto straight = helicoid_point({2.0 - I}).position;
  const auto bent = helicoid_point({2.0, 2.0 - I}).position;
  EXPECT_LT(test::dist(straight, bent), 1e-10);
}

TEST(Helicoid, ContainsAxisAndHorizontalLines) {
  test::Gen gen(51);
  for (int k = 0; k < 50; ++k) {
    const double y = gen.uniform(-pi, pi);
    const auto axis = helicoid_closed({0.0, y});
    EXPECT_EQ(std::hypot(axis[0], axis[1]), 0.0);
    // Points on a line y = const are collinear with the axis point at that height.
    const auto p = helicoid_closed({gen.uniform(-2, 2), y}), q = helicoid_closed({gen.uniform(-2, 2), y});
    EXPECT_EQ(p[2], q[2]);
    EXPECT_LT(std::abs(p[0] * q[1] - p[1] * q[0]), 1e-12);
  }
}

TEST(Helicoid, GaussMapIsStereographicNormal) {
  const auto p = helicoid_point({0.7 - 1.1 * I});
  const double h = 1e-5;
  const cplx z = 0.7 - 1.1 * I;
  const Vec3 dx = helicoid_closed(z + h) - helicoid_closed(z - h);
  const Vec3 dy = helicoid_closed(z + I * h) - helicoid_closed(z - I * h);
  const Vec3 n = normalized(cross(dx, dy));
  EXPECT_LT(std::min(test::dist(n, p.normal), test::dist(-1.0 * n, p.normal)), 1e-8);
}

TEST(Catenoid, ClosedFormValues) {
  EXPECT_EQ(norm(catenoid_closed(0.0)), 0.0);
  EXPECT_LT(test::dist(catenoid_closed(I * pi), {2, 0, 0}), 1e-15);
}

TEST(Catenoid, ConjugateOfHelicoidOnGrid) {
  double worst = 0;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const cplx z{-2 + 4.0 * i / 19, -pi + 2 * pi * j / 19};
      worst = std::max(worst, test::dist(catenoid_weierstrass(z), catenoid_closed(z)));
    }
  EXPECT_LT(worst, 1e-9);
}

TEST(Catenoid, RadiusIsCoshOfHeight) {
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const auto x = catenoid_closed({-2 + 4.0 * i / 19, -pi + 2 * pi * j / 19});
      EXPECT_NEAR((x[0] - 1) * (x[0] - 1) + x[1] * x[1], std::cosh(x[2]) * std::cosh(x[2]), 1e-9);
    }
}

TEST(Conjugation, TwiceNegates) {
  // Rotating dh by -i turns the real part into the conjugate surface; doing it
  // twice gives -X.
  const std::vector<cplx> pts{0.0, 0.8 + 0.4 * I, -0.3 + 1.2 * I};
  const auto path = plane_polyline(pts);
  const auto once = integrate_weierstrass(path, HelicoidData{-I}, WeierstrassState{});
  const auto twice = integrate_weierstrass(path, HelicoidData{-1.0}, WeierstrassState{});
  const auto x = helicoid_point({0.8 + 0.4 * I, -0.3 + 1.2 * I});
  EXPECT_LT(test::dist(real_part(once.phi), conjugate_helicoid_point({0.8 + 0.4 * I, -0.3 + 1.2 * I}).position), 1e-12);
  EXPECT_LT(test::dist(real_part(twice.phi), -1.0 * x.position), 1e-12);
  EXPECT_LT(test::dist(imag_part(once.phi), -1.0 * x.position), 1e-12);
}

TEST(ReferenceMesh, VerticesOnClosedForm) {
  for (auto kind : {ReferenceKind::helicoid, ReferenceKind::catenoid}) {
    const auto m = reference_mesh(kind, 16);
    for (const auto& v : m.vertices) {
      const Vec3 x = kind == ReferenceKind::helicoid ? helicoid_closed(v.flat_coord) : catenoid_closed(v.flat_coord);
      EXPECT_LT(test::dist(x, v.position), 1e-9);
    }
  }
}
