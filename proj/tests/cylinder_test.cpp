#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "nccyl/nccyl.hpp"
#include "test_support.hpp"

using namespace nccyl;

namespace {

constexpr double kTol = 1e-8;
constexpr double kPsiTol = 1e-6;
const double kHbars[] = {0.5, 1.0, 2.0};

// Numeric twin of an element: plain closures, product by the shift formula.
using Fn = std::function<cplx(double)>;
using NumElem = std::map<int, Fn>;

NumElem numeric(const CylinderElement& f) {
  NumElem out;
  for (const auto& [n, c] : f.coeffs()) out[n] = [c](double u) { return eval(c, u); };
  return out;
}

cplx oracle_product_mode(const NumElem& f, const NumElem& g, double h, int n, double u) {
  cplx s = 0.0;
  for (const auto& [k, fk] : f) {
    auto it = g.find(n - k);
    if (it != g.end()) s += fk(u) * it->second(u + k * h);
  }
  return s;
}

// Closed form of the integral of c1 c2 exp(-a1 (u-b1)^2 - a2 (u-b2)^2).
cplx gaussian_pair_integral(double a1, double b1, cplx c1, double a2, double b2, cplx c2) {
  const double a = a1 + a2;
  const double m = (a1 * b1 + a2 * b2) / a;
  const double rest = a1 * b1 * b1 + a2 * b2 * b2 - a * m * m;
  return c1 * c2 * std::sqrt(std::numbers::pi / a) * std::exp(-rest);
}

CylinderElement mode_only(double h, int n, FieldExpr f) { return CylinderElement::mode(h, n, std::move(f)); }

}  // namespace

TEST(Multiply, SingleModeTimesFunction) {
  const double h = 0.5;
  const FieldExpr f1 = gaussian(1.0, 0.3), g0 = hyperbolic_tangent(variable()) * gaussian(0.7, -0.2);
  const CylinderElement p = multiply(mode_only(h, 1, f1), mode_only(h, 0, g0));
  ASSERT_EQ(p.modes(), std::vector<int>{1});
  for (double u : {-1.0, 0.0, 0.4, 2.0})
    EXPECT_NEAR(std::abs(eval(p.coeff(1), u) - eval(f1, u) * eval(g0, u + h)), 0.0, 1e-15);
}

TEST(Multiply, ByZero) {
  Rng rng(1);
  const CylinderElement f = random_element(rng, 0.5);
  const CylinderElement z(0.5, {});
  EXPECT_TRUE(multiply(f, z).modes().empty());
  EXPECT_TRUE(multiply(z, f).modes().empty());
}

TEST(Multiply, FrozenGaussianModeZero) {
  const double h = 0.5;
  const FieldExpr e = exponential(scale(power(variable(), 2), -1.0));
  const CylinderElement p = multiply(mode_only(h, 1, e), mode_only(h, -1, e));
  const double oracle = std::exp(0.0) * std::exp(-0.25);
  EXPECT_NEAR(oracle, 0.7788007830714049, 1e-16);
  EXPECT_NEAR(eval(p.coeff(0), 0.0).real(), 0.7788007830714049, 1e-15);
}

TEST(Multiply, HbarMismatch) {
  EXPECT_THROW(multiply(mode_only(0.5, 0, gaussian(1, 0)), mode_only(1.0, 0, gaussian(1, 0))), HbarMismatch);
}

TEST(Multiply, ModeSupportIsMinkowskiSum) {
  const CylinderElement f(1.0, {{-1, gaussian(1, 0)}, {2, gaussian(1, 1)}});
  const CylinderElement g(1.0, {{0, gaussian(1, 0)}, {3, gaussian(1, 1)}});
  EXPECT_EQ(multiply(f, g).modes(), (std::vector<int>{-1, 2, 5}));
}

TEST(MultiplyProperty, AgreesWithPointwiseOracle) {
  Rng rng(5);
  for (double h : kHbars) {
    for (int t = 0; t < 40; ++t) {
      const CylinderElement f = random_element(rng, h), g = random_element(rng, h);
      const CylinderElement p = multiply(f, g);
      const NumElem nf = numeric(f), ng = numeric(g);
      for (int n = -6; n <= 6; ++n) {
        for (double u : {-1.7, -0.2, 0.0, 0.9, 2.3}) {
          EXPECT_NEAR(std::abs(eval(p.coeff(n), u) - oracle_product_mode(nf, ng, h, n, u)), 0.0, 1e-14);
        }
      }
    }
  }
}

TEST(Star, Involutive) {
  Rng rng(2);
  for (double h : kHbars)
    for (int t = 0; t < 30; ++t) {
      const CylinderElement f = random_element(rng, h);
      EXPECT_LE(distance(star(star(f)), f), kTol);
    }
}

TEST(Star, RealModeZeroIsHermitian) {
  const CylinderElement f = mode_only(0.5, 0, gaussian(1.0, 0.2) * hyperbolic_tangent(variable()));
  EXPECT_EQ(distance(star(f), f), 0.0);
}

TEST(Star, ModeOneFormula) {
  const double h = 0.7;
  const FieldExpr f = gaussian(1.2, 0.4, cplx(0.3, 0.8));
  const CylinderElement s = star(mode_only(h, 1, f));
  ASSERT_EQ(s.modes(), std::vector<int>{-1});
  for (double u : {-1.0, 0.0, 0.5, 1.5})
    EXPECT_NEAR(std::abs(eval(s.coeff(-1), u) - std::conj(eval(f, u - h))), 0.0, 1e-15);
}

TEST(StarProperty, AntiHomomorphism) {
  Rng rng(3);
  for (double h : kHbars)
    for (int t = 0; t < 30; ++t) {
      const CylinderElement f = random_element(rng, h), g = random_element(rng, h);
      EXPECT_LE(distance(star(f * g), star(g) * star(f)), kTol);
    }
}

TEST(Derivations, D2KillsModeZero) {
  EXPECT_TRUE(d2(mode_only(1.0, 0, gaussian(1, 0))).modes().empty());
}

TEST(Derivations, D2Formula) {
  const FieldExpr f = gaussian(1.0, 0.0);
  const CylinderElement d = d2(mode_only(1.0, -2, f));
  EXPECT_NEAR(std::abs(eval(d.coeff(-2), 0.3) - (-2.0) * kTwoPiI * eval(f, 0.3)), 0.0, 1e-14);
}

TEST(DerivationsProperty, CommuteAndHermitian) {
  Rng rng(4);
  for (double h : kHbars)
    for (int t = 0; t < 30; ++t) {
      const CylinderElement f = random_element(rng, h);
      EXPECT_LE(distance(d1(d2(f)), d2(d1(f))), kTol);
      EXPECT_LE(distance(star(d1(f)), d1(star(f))), kTol);
      EXPECT_LE(distance(star(d2(f)), d2(star(f))), kTol);
    }
}

TEST(DerivationsProperty, Leibniz) {
  Rng rng(6);
  for (double h : kHbars)
    for (int t = 0; t < 30; ++t) {
      const CylinderElement f = random_element(rng, h), g = random_element(rng, h);
      EXPECT_LE(distance(d1(f * g), d1(f) * g + f * d1(g)), kTol);
      EXPECT_LE(distance(d2(f * g), d2(f) * g + f * d2(g)), kTol);
    }
}

TEST(Trace, NoModeZero) {
  EXPECT_EQ(trace(mode_only(1.0, 2, gaussian(1, 0))), cplx(0.0));
}

TEST(Trace, UnboundedModeZeroIsNotTraceClass) {
  EXPECT_THROW(trace(mode_only(1.0, 0, log_cosh(variable()))), NotTraceClass);
  EXPECT_THROW(trace(mode_only(1.0, 0, constant(1.0))), NotTraceClass);
}

TEST(Trace, ClosedFormOnGaussianPair) {
  Rng rng(8);
  for (double h : kHbars)
    for (int t = 0; t < 20; ++t) {
      const int k = rng.integer(-3, 3);
      const double a1 = rng.uniform(0.5, 2), b1 = rng.uniform(-2, 2), a2 = rng.uniform(0.5, 2), b2 = rng.uniform(-2, 2);
      const cplx c1(rng.uniform(-1, 1), rng.uniform(-1, 1)), c2(rng.uniform(-1, 1), rng.uniform(-1, 1));
      const CylinderElement f = mode_only(h, k, gaussian(a1, b1, c1));
      const CylinderElement g = mode_only(h, -k, gaussian(a2, b2, c2));
      // g shifted by k h has centre b2 - k h.
      const cplx oracle = gaussian_pair_integral(a1, b1, c1, a2, b2 - k * h, c2);
      EXPECT_NEAR(std::abs(trace(f * g) - oracle), 0.0, 1e-10);
    }
}

TEST(TraceProperty, CyclicityAndVanishingOnDerivatives) {
  Rng rng(9);
  for (double h : kHbars)
    for (int t = 0; t < 30; ++t) {
      const CylinderElement f = random_element(rng, h), g = random_element(rng, h);
      EXPECT_LE(std::abs(trace(f * g) - trace(g * f)), kTol);
      EXPECT_LE(std::abs(trace(d1(f))), kTol);
      EXPECT_LE(std::abs(trace(d2(f))), kTol);
    }
}

TEST(TraceProperty, PositivityAndHermiticity) {
  Rng rng(10);
  for (double h : kHbars)
    for (int t = 0; t < 30; ++t) {
      const CylinderElement f = random_element(rng, h);
      const cplx p = trace(star(f) * f);
      EXPECT_GE(p.real(), -1e-9);
      EXPECT_LE(std::abs(p.imag()), 1e-9);
      EXPECT_LE(std::abs(trace(star(f)) - std::conj(trace(f))), 1e-10);
    }
}

TEST(Associativity, RandomTriples) {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const double h = kHbars[t % 3];
    const CylinderElement f = random_element(rng, h), g = random_element(rng, h), k = random_element(rng, h);
    EXPECT_LE(distance((f * g) * k, f * (g * k)), kTol);
  }
}

TEST(Cocycle, ModeZeroOnlyVanishes) {
  const CylinderElement a = mode_only(0.5, 0, gaussian(1, 0)), b = mode_only(0.5, 0, gaussian(1, 1)),
                        c = mode_only(0.5, 0, gaussian(0.7, -1));
  EXPECT_EQ(cocycle_psi(a, b, c), cplx(0.0));
}

TEST(CocycleProperty, CyclicAndHochschild) {
  Rng rng(12);
  for (double h : kHbars)
    for (int t = 0; t < 10; ++t) {
      const CylinderElement f0 = random_element(rng, h, 2), f1 = random_element(rng, h, 2),
                            f2 = random_element(rng, h, 2), f3 = random_element(rng, h, 2);
      EXPECT_LE(std::abs(cocycle_psi(f2, f0, f1) - cocycle_psi(f0, f1, f2)), kPsiTol);
      const cplx b = cocycle_psi(f0 * f1, f2, f3) - cocycle_psi(f0, f1 * f2, f3) + cocycle_psi(f0, f1, f2 * f3) -
                     cocycle_psi(f3 * f0, f1, f2);
      EXPECT_LE(std::abs(b), kPsiTol);
    }
}

TEST(CocycleOracle, AgreesWithDirectQuadrature) {
  Rng rng(13);
  const double h = 0.5;
  for (int t = 0; t < 5; ++t) {
    const CylinderElement f0 = random_element(rng, h, 2), f1 = random_element(rng, h, 2), f2 = random_element(rng, h, 2);
    const NumElem a = numeric(f0), b1 = numeric(d1(f1)), b2 = numeric(d2(f1)), c1 = numeric(d1(f2)), c2 = numeric(d2(f2));
    // mode-0 coefficient of a b c: sum over i + j + k = 0 of a_i(u) b_j(u + i h) c_k(u + (i + j) h).
    auto triple = [&](const NumElem& x, const NumElem& y, const NumElem& z, double u) {
      cplx s = 0.0;
      for (const auto& [i, xi] : x)
        for (const auto& [j, yj] : y) {
          auto it = z.find(-i - j);
          if (it != z.end()) s += xi(u) * yj(u + i * h) * it->second(u + (i + j) * h);
        }
      return s;
    };
    const cplx oracle =
        testsupport::simpson([&](double u) { return triple(a, b1, c2, u) - triple(a, b2, c1, u); }, -15.0, 15.0, 60000) /
        kTwoPiI;
    EXPECT_NEAR(std::abs(cocycle_psi(f0, f1, f2) - oracle), 0.0, kPsiTol);
  }
}

TEST(Commutator, ModeZeroVanishes) {
  EXPECT_TRUE(commutator_with_u(mode_only(1.0, 0, gaussian(1, 0))).modes().empty());
}

TEST(Commutator, ModeOneIsHbarTimes) {
  const double h = 0.6;
  const FieldExpr f = gaussian(1.0, 0.5, cplx(0.2, 0.4));
  const CylinderElement c = commutator_with_u(mode_only(h, 1, f));
  for (double u : {-1.0, 0.0, 1.0}) EXPECT_NEAR(std::abs(eval(c.coeff(1), u) - h * eval(f, u)), 0.0, 1e-15);
}

TEST(CommutatorProperty, MatchesD2AndUProducts) {
  Rng rng(14);
  for (double h : kHbars)
    for (int t = 0; t < 30; ++t) {
      const CylinderElement f = random_element(rng, h);
      EXPECT_LE(distance((kTwoPiI / h) * commutator_with_u(f), d2(f)), kTol);
      EXPECT_LE(distance(right_multiply_u(f) - left_multiply_u(f), commutator_with_u(f)), kTol);
    }
}

TEST(Distance, ReflexiveAndSymmetric) {
  Rng rng(15);
  for (int t = 0; t < 20; ++t) {
    const CylinderElement f = random_element(rng, 0.5), g = random_element(rng, 0.5);
    EXPECT_EQ(distance(f, f), 0.0);
    EXPECT_NEAR(distance(f, g), distance(g, f), 1e-12);
    EXPECT_GT(distance(f, g), 0.0);
  }
}

TEST(DecayClass, ExtendedIsSticky) {
  const CylinderElement s = mode_only(1.0, 0, gaussian(1, 0));
  const CylinderElement e = mode_only(1.0, 1, log_cosh(variable()));
  EXPECT_EQ(s.decay_class(), DecayClass::SchwartzLike);
  EXPECT_EQ(e.decay_class(), DecayClass::Extended);
  EXPECT_EQ((s * e).decay_class(), DecayClass::Extended);
  EXPECT_EQ((s + e).decay_class(), DecayClass::Extended);
  EXPECT_EQ((s * s).decay_class(), DecayClass::SchwartzLike);
}
