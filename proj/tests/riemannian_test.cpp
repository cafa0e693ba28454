#include <gtest/gtest.h>

#include <cmath>

#include "nccyl/nccyl.hpp"
#include "test_support.hpp"

using namespace nccyl;
using testsupport::richardson_diff;

namespace {

FieldExpr u() { return variable(); }
FieldExpr catenoid() { return log_cosh(u()); }

double grid(int i, int n, double lo, double hi) { return lo + (hi - lo) * i / (n - 1); }

}  // namespace

TEST(ConformalMetric, Basics) {
  const Metric flat = conformal_metric(zero());
  for (double x : {-3.0, 0.0, 2.0}) {
    EXPECT_EQ(eval(flat.h[0][0], x), cplx(1.0));
    EXPECT_EQ(eval(flat.h[0][1], x), cplx(0.0));
    EXPECT_EQ(eval(flat.h[1][1], x), cplx(1.0));
  }
  const Metric cat = conformal_metric(catenoid());
  EXPECT_EQ(eval(cat.h[0][0], 0.0), cplx(1.0));
  const FieldExpr det = metric_det(cat);
  for (int i = 0; i < 101; ++i) {
    const double x = grid(i, 101, -10, 10);
    EXPECT_GT(eval(det, x).real(), 0.0);
    EXPECT_NEAR(eval(det, x).real() / std::pow(std::cosh(x), 4), 1.0, 1e-12);
  }
}

TEST(Metric, Validation) {
  Metric bad{{{{constant(1.0), constant(0.5)}, {constant(0.0), constant(1.0)}}}};
  EXPECT_THROW(validate_metric(bad), InvalidArgument);
  Metric cx{{{{constant(cplx(1.0, 1.0)), zero()}, {zero(), constant(1.0)}}}};
  EXPECT_THROW(validate_metric(cx), InvalidArgument);
  Metric sing{{{{u(), zero()}, {zero(), constant(1.0)}}}};
  EXPECT_THROW(christoffel(sing), SingularMetric);
}

TEST(Christoffel, ConformalClosedForm) {
  const FieldExpr k = gaussian(0.6, 0.4, 0.7) + scale(hyperbolic_tangent(u()), 0.3);
  const Christoffel g = christoffel(conformal_metric(k));
  auto kf = [&](double x) { return eval(k, x); };
  for (int i = 0; i < 1000; ++i) {
    const double x = grid(i, 1000, -5, 5);
    const double kp = eval(derivative(k), x).real();
    EXPECT_NEAR(richardson_diff(kf, x).real(), kp, 1e-8);
    EXPECT_NEAR(eval(g[0][0][0], x).real(), kp, 1e-10);
    EXPECT_NEAR(eval(g[1][0][1], x).real(), kp, 1e-10);
    EXPECT_NEAR(eval(g[1][1][0], x).real(), kp, 1e-10);
    EXPECT_NEAR(eval(g[0][1][1], x).real(), -kp, 1e-10);
    EXPECT_NEAR(std::abs(eval(g[0][0][1], x)), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(eval(g[0][1][0], x)), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(eval(g[1][0][0], x)), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(eval(g[1][1][1], x)), 0.0, 1e-10);
  }
}

TEST(Christoffel, CatenoidValueAtOne) {
  const Christoffel g = christoffel(conformal_metric(catenoid()));
  EXPECT_NEAR(eval(g[0][0][0], 1.0).real(), 0.7615941559557649, 1e-15);
  EXPECT_NEAR(std::tanh(1.0), 0.7615941559557649, 1e-16);
}

TEST(Christoffel, ConstantMetricIsFlat) {
  const Metric m{{{{constant(2.0), constant(0.5)}, {constant(0.5), constant(3.0)}}}};
  const Christoffel g = christoffel(m);
  for (int l = 0; l < 2; ++l)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) EXPECT_TRUE(g[l][i][j].is_zero() || eval(g[l][i][j], 0.3) == cplx(0.0));
  EXPECT_EQ(verify_pseudo_riemannian(m, g).max(), 0.0);
}

// Diagonal non-conformal metric diag(a, b): closed-form symbols.
TEST(Christoffel, DiagonalClosedForm) {
  const FieldExpr a = exponential(scale(hyperbolic_tangent(u()), 0.5)), b = constant(2.0) + gaussian(1.0, 0.0);
  const Metric m{{{{a, zero()}, {zero(), b}}}};
  const Christoffel g = christoffel(m);
  for (int i = 0; i < 201; ++i) {
    const double x = grid(i, 201, -4, 4);
    const double av = eval(a, x).real(), bv = eval(b, x).real();
    const double ap = richardson_diff([&](double y) { return eval(a, y); }, x).real();
    const double bp = richardson_diff([&](double y) { return eval(b, y); }, x).real();
    EXPECT_NEAR(eval(g[0][0][0], x).real(), ap / (2 * av), 1e-8);
    EXPECT_NEAR(eval(g[0][1][1], x).real(), -bp / (2 * av), 1e-8);
    EXPECT_NEAR(eval(g[1][0][1], x).real(), bp / (2 * bv), 1e-8);
    EXPECT_NEAR(eval(g[1][1][0], x).real(), bp / (2 * bv), 1e-8);
    EXPECT_NEAR(std::abs(eval(g[1][0][0], x)), 0.0, 1e-14);
  }
}

TEST(Compatibility, KoszulPassesAndPerturbationIsDetected) {
  const Metric m = conformal_metric(catenoid());
  Christoffel g = christoffel(m);
  const auto r = verify_pseudo_riemannian(m, g);
  EXPECT_LE(r.metric, 1e-9);
  EXPECT_LE(r.torsion, 1e-9);
  g[0][0][0] = g[0][0][0] + constant(1e-3);
  const auto bad = verify_pseudo_riemannian(m, g);
  EXPECT_GT(bad.metric, 1e-3 * 0.5);
}

TEST(Compatibility, IndefiniteMetric) {
  const FieldExpr e = exponential(scale(catenoid(), 2.0));
  const Metric m{{{{e, zero()}, {zero(), scale(e, -1.0)}}}};
  const Christoffel g = christoffel(m);
  EXPECT_LE(verify_pseudo_riemannian(m, g).max(), 1e-9);
  const Matrix2 inv = metric_inverse(m);
  for (double x : {-2.0, 0.0, 1.5}) {
    EXPECT_NEAR(std::abs(eval(inv[0][0], x) * eval(m.h[0][0], x) - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(eval(inv[1][1], x) * eval(m.h[1][1], x) - 1.0), 0.0, 1e-14);
  }
}

// A symbol set built from closed forms that passes compatibility agrees with Koszul.
TEST(Compatibility, UniquenessAgainstIndependentConstruction) {
  const FieldExpr k = scale(log_cosh(u()), 0.7) + gaussian(1.0, 0.5, 0.2);
  const Metric m = conformal_metric(k);
  const FieldExpr kp = derivative(k);
  Christoffel ind;
  for (auto& a : ind)
    for (auto& b : a)
      for (auto& c : b) c = zero();
  ind[0][0][0] = kp;
  ind[1][0][1] = kp;
  ind[1][1][0] = kp;
  ind[0][1][1] = scale(kp, -1.0);
  ASSERT_LE(verify_pseudo_riemannian(m, ind).max(), 1e-9);
  const Christoffel g = christoffel(m);
  for (int p = 0; p < 201; ++p) {
    const double x = grid(p, 201, -5, 5);
    for (int l = 0; l < 2; ++l)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_NEAR(std::abs(eval(g[l][i][j], x) - eval(ind[l][i][j], x)), 0.0, 1e-8);
  }
}

TEST(Curvature, GaussianMatchesConformalFormula) {
  for (const FieldExpr& k : {catenoid(), gaussian(0.8, -0.3, 0.5), scale(hyperbolic_tangent(u()), 0.4) + gaussian(1.0, 1.0, -0.3)}) {
    const Metric m = conformal_metric(k);
    const CurvatureReport rep = curvature_tensor(m, christoffel(m));
    const FieldExpr kpp = derivative(derivative(k));
    auto kpf = [&](double y) { return eval(derivative(k), y); };
    for (int i = 0; i < 1000; ++i) {
      const double x = grid(i, 1000, -5, 5);
      const double expect = -std::exp(-2.0 * eval(k, x).real()) * eval(kpp, x).real();
      EXPECT_NEAR(eval(rep.gaussian, x).real(), expect, 1e-10);
      if (i % 50 == 0) {
        EXPECT_NEAR(richardson_diff(kpf, x).real(), eval(kpp, x).real(), 1e-7);
      }
      EXPECT_NEAR(eval(rep.R1212, x).real(), -std::exp(2.0 * eval(k, x).real()) * eval(kpp, x).real(), 1e-10 * std::max(1.0, std::exp(2.0 * eval(k, x).real())));
    }
  }
}

TEST(Curvature, CatenoidAtZeroIsMinusOne) {
  const Metric m = conformal_metric(catenoid());
  const CurvatureReport rep = curvature_tensor(m, christoffel(m));
  EXPECT_NEAR(eval(rep.gaussian, 0.0).real(), -1.0, 1e-15);
  for (double x : {-2.0, 0.5, 3.0}) EXPECT_NEAR(eval(rep.gaussian, x).real(), -std::pow(std::cosh(x), -4), 1e-12);
}

TEST(Curvature, FlatMetric) {
  const Metric m = conformal_metric(constant(0.3));
  const CurvatureReport rep = curvature_tensor(m, christoffel(m));
  for (double x : {-2.0, 0.0, 2.0}) EXPECT_EQ(eval(rep.gaussian, x), cplx(0.0));
}

TEST(Curvature, ClassicalAntisymmetry) {
  const FieldExpr k = scale(log_cosh(u()), 0.5) + gaussian(1.0, 0.0, 0.3);
  const Metric m = conformal_metric(k);
  const CurvatureReport rep = curvature_tensor(m, christoffel(m));
  // h(e2, R(d1, d2) e1)
  const FieldExpr other = m.h[1][0] * rep.riemann[0][0][0][1] + m.h[1][1] * rep.riemann[1][0][0][1];
  for (int i = 0; i < 401; ++i) {
    const double x = grid(i, 401, -5, 5);
    EXPECT_NEAR(std::abs(eval(rep.R1212, x) + eval(other, x)), 0.0, 1e-10);
  }
}

TEST(TotalCurvature, Catenoid) {
  const TotalCurvature t = total_curvature(catenoid());
  EXPECT_NEAR(t.total.real(), -2.0, 1e-6);
  EXPECT_NEAR(t.total.imag(), 0.0, 1e-12);
  EXPECT_NEAR(t.total.real(), t.slope_formula, 1e-8);
  EXPECT_EQ(t.U, 20.0);
}

TEST(TotalCurvature, ConstantKIsZero) {
  const TotalCurvature t = total_curvature(constant(0.4));
  EXPECT_EQ(t.total, cplx(0.0));
  EXPECT_EQ(t.slope_formula, 0.0);
}

TEST(TotalCurvature, UnstableSlopesThrow) {
  // k' = u grows without bound.
  const FieldExpr k = scale(power(u(), 2), 0.5);
  EXPECT_THROW(total_curvature(k), NonConvergent);
}

TEST(Perturbation, GaussianBumpsLeaveTotalInvariant) {
  Rng rng(41);
  for (int t = 0; t < 10; ++t) {
    const FieldExpr delta = gaussian(rng.uniform(0.5, 2), rng.uniform(-2, 2), rng.uniform(-0.5, 0.5));
    const PerturbationResult r = perturbation_invariance(catenoid(), delta);
    EXPECT_TRUE(r.precondition_holds);
    EXPECT_NEAR(std::abs(r.perturbed.total - r.base.total), 0.0, 1e-6);
    EXPECT_NEAR(r.perturbed.total.real(), -2.0, 1e-6);
  }
}

TEST(Perturbation, ZeroDelta) {
  const PerturbationResult r = perturbation_invariance(catenoid(), zero());
  EXPECT_TRUE(r.precondition_holds);
  EXPECT_EQ(r.base.total, r.perturbed.total);
}

TEST(Perturbation, UnequalSlopeLimitsShiftTheTotal) {
  const double c = 0.5;
  const FieldExpr delta = scale(log_cosh(u()), c);  // delta' -> -c and +c
  const PerturbationResult r = perturbation_invariance(catenoid(), delta);
  EXPECT_FALSE(r.precondition_holds);
  EXPECT_NEAR(r.perturbed.total.real() - r.base.total.real(), -c - c, 1e-6);
}
