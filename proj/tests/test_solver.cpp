#include <gtest/gtest.h>

#include "support.hpp"

using namespace he1;

TEST(Solver, RootNearPaperModulus) {
  const auto& s = test::solved();
  EXPECT_NEAR(s.params.lambda, 0.32, 0.02);
  EXPECT_LT(s.report.defect, 1e-8);
  EXPECT_EQ(s.report.targets, default_targets);
}

TEST(Solver, FreshPeriodsAtSolution) {
  const auto& p = test::solved().params;
  const HCurve c(p.lambda);
  const auto dgg = make_dg_over_g(p);
  const int n[2] = {default_targets.n_a, default_targets.n_b};
  const Cycle* cy[2] = {&c.cycle_a(), &c.cycle_b()};
  for (int k = 0; k < 2; ++k)
    EXPECT_LT(std::abs(integrate_path(dgg, cy[k]->segments) - 2 * pi * I * static_cast<double>(n[k])), 1e-9);
  const auto per = coordinate_periods(p);
  for (int k = 0; k < 2; ++k)
    for (int comp = 0; comp < 3; ++comp) EXPECT_LT(std::abs(per[k][comp].real()), 1e-8) << k << comp;
}

TEST(Solver, ParametersAreReal) {
  const auto& p = test::solved().params;
  EXPECT_LT(p.a, p.lambda);
  EXPECT_LE(p.alpha, p.beta);
  // With the real curve and real a, alpha, beta, rho lands on the imaginary axis.
  EXPECT_LT(std::abs(p.rho.real()), 1e-15);
}

TEST(Solver, NestedSolveReproducesAlphaBeta) {
  const auto& p = test::solved().params;
  const auto [al, be] = solve_alpha_beta(p.lambda, p.a, default_targets);
  EXPECT_NEAR(al, p.alpha, 1e-8);
  EXPECT_NEAR(be, p.beta, 1e-8);
}

TEST(Solver, AlphaBetaMeetsTargetsOffSolution) {
  test::Gen gen(41);
  for (int k = 0; k < 5; ++k) {
    const double lam = gen.uniform(0.25, 0.4), a = lam - gen.uniform(0.3, 1.0);
    const auto [al, be] = solve_alpha_beta(lam, a, default_targets);
    EXPECT_LE(al, be);
    const auto p = HandleParams::make(lam, a, al, be);
    const HCurve c(lam);
    EXPECT_LT(std::abs(integrate_path(make_dg_over_g(p), c.cycle_a().segments)), 1e-9);
    EXPECT_LT(std::abs(integrate_path(make_dg_over_g(p), c.cycle_b().segments) - 2 * pi * I), 1e-9);
  }
}

TEST(Solver, SolveAIsLocallyUnique) {
  const auto& p = test::solved().params;
  const auto [a, al, be] = solve_a(p.lambda, default_targets);
  EXPECT_NEAR(a, p.a, 1e-6);
  EXPECT_LT(std::abs(a_condition(p.lambda, a)), 1e-9);
  EXPECT_LT(a_condition(p.lambda, a - 1e-3) * a_condition(p.lambda, a + 1e-3), 0.0);
  EXPECT_NE(a, p.lambda);
}

TEST(Solver, LambdaResidualChangesSignNearPaperValue) {
  EXPECT_LT(lambda_residual(0.30, default_targets) * lambda_residual(0.34, default_targets), 0.0);
  const double lam = test::solved().params.lambda;
  EXPECT_EQ(lambda_residual(0.31, default_targets), lambda_residual(0.31, default_targets));
  EXPECT_LT(std::abs(lambda_residual(lam, default_targets)), 1e-8);
}

TEST(Solver, NoRootOutsideBracket) {
  try {
    solve_full(default_targets, 0.9, 0.95);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::no_root);
  }
}

TEST(Solver, ResiduesInReport) {
  const auto& r = test::solved().report;
  EXPECT_LT(std::abs(r.residues[0] - 1.0), 1e-10);
  EXPECT_LT(std::abs(r.residues[1] + 1.0), 1e-10);
}

TEST(Solver, Deterministic) {
  const auto s = solve_full(default_targets, 0.2, 0.45);
  EXPECT_EQ(s.params.lambda, test::solved().params.lambda);
  EXPECT_EQ(s.params.a, test::solved().params.a);
  EXPECT_EQ(s.params.alpha, test::solved().params.alpha);
  EXPECT_EQ(s.report.defect, test::solved().report.defect);
}

TEST(Solver, SymmetricFunctionsOfAlphaBetaAreSmooth) {
  // Second differences of alpha + beta and alpha * beta in lambda and a stay
  // of the size expected for a smooth function.
  const auto& p = test::solved().params;
  const double h = 1e-3;
  for (int dir = 0; dir < 2; ++dir) {
    double sum[3], prod[3];
    for (int k = -1; k <= 1; ++k) {
      const double lam = p.lambda + (dir == 0 ? k * h : 0), a = p.a + (dir == 1 ? k * h : 0);
      const auto [al, be] = solve_alpha_beta(lam, a, default_targets);
      sum[k + 1] = al + be;
      prod[k + 1] = al * be;
    }
    EXPECT_LT(std::abs(sum[0] - 2 * sum[1] + sum[2]) / (h * h), 100.0);
    EXPECT_LT(std::abs(prod[0] - 2 * prod[1] + prod[2]) / (h * h), 100.0);
  }
}

TEST(Solver, PartitionDiagnosis) {
  const auto d = diagnose_partition(default_targets, {0.28, 0.32, 0.36}, {0.5, 0.7});
  // x1 periods vanish on both cycles by symmetry.
  EXPECT_TRUE(d.identically_zero[0][0]);
  EXPECT_TRUE(d.identically_zero[1][0]);
  EXPECT_EQ(d.partition.a_cycle, Partition{}.a_cycle);
  EXPECT_EQ(d.partition.a_component, Partition{}.a_component);
  EXPECT_EQ(d.partition.lambda_cycle, Partition{}.lambda_cycle);
  EXPECT_EQ(d.partition.lambda_component, Partition{}.lambda_component);
}
