#include <gtest/gtest.h>

#include "support.hpp"

using namespace he1;

TEST(Polynomial, RootsOfProductAreTheFactors) {
  test::Gen gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = gen.integer(1, 6);
    std::vector<cplx> roots;
    for (int k = 0; k < n; ++k) roots.push_back(gen.complex_in(-2, 2, -2, 2));
    const auto found = Polynomial::from_roots(roots).roots();
    ASSERT_EQ(found.size(), roots.size());
    for (cplx r : roots) {
      double best = 1e300;
      for (cplx f : found) best = std::min(best, std::abs(f - r));
      EXPECT_LT(best, 1e-6) << "trial " << trial;
    }
  }
}

TEST(Polynomial, DerivativeAndArithmetic) {
  const Polynomial p{1.0, -2.0, 3.0};  // 1 - 2z + 3z^2
  const Polynomial q{0.0, 1.0};
  EXPECT_EQ(p.degree(), 2);
  EXPECT_NEAR(std::abs(p.derivative()(2.0) - 10.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs((p * q)(2.0) - 18.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs((p + q)(2.0) - 11.0), 0.0, 1e-14);
}

TEST(Quadrature, SmoothIntegrand) {
  const cplx v = integrate_unit_scalar([](double s) { return std::exp(cplx{0, 3} * s); });
  const cplx exact = (std::exp(cplx{0, 3}) - 1.0) / cplx{0, 3};
  EXPECT_LT(std::abs(v - exact), 1e-14);
}

TEST(Quadrature, GaussLegendreIsExactOnPolynomials) {
  std::vector<double> x, w;
  gauss_legendre_unit(10, x, w);
  double s = 0;
  for (std::size_t k = 0; k < x.size(); ++k) s += w[k] * std::pow(x[k], 19);
  EXPECT_NEAR(s, 1.0 / 20, 1e-15);
}

TEST(Quadrature, ReportsFailureWithEstimate) {
  QuadratureOptions opt;
  opt.rel_tol = 1e-15;
  opt.abs_tol = 0;
  opt.max_subdivisions = 3;
  try {
    integrate_unit_scalar([](double s) { return cplx{std::pow(std::abs(s - 1.0 / 3), -0.5), 0}; }, opt);
    FAIL() << "expected a quadrature failure";
  } catch (const QuadratureError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::quadrature_failure);
    EXPECT_GT(e.bound(), 0);
    EXPECT_TRUE(std::isfinite(e.estimate().real()));
  }
}

TEST(Vec3, StereographicNormalIsUnit) {
  test::Gen gen(3);
  for (int k = 0; k < 100; ++k) {
    const cplx g = gen.complex_in(-5, 5, -5, 5);
    EXPECT_NEAR(norm(normal_from_gauss(g)), 1.0, 1e-14);
  }
  const Vec3 up = normal_from_gauss(1e20);
  EXPECT_NEAR(up[2], 1.0, 1e-12);
}
