#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "nccyl/bimodule.hpp"
#include "nccyl/cylinder.hpp"
#include "nccyl/error.hpp"
#include "nccyl/field_expr.hpp"
#include "nccyl/random.hpp"

namespace nccyl {

/// nabla1 = alpha d/dx, nabla2 = multiplication by beta x + gamma k.
struct ConnParams {
  cplx alpha{1.0};
  cplx beta{0.0};
  cplx gamma{0.0};
};

inline Section nabla1(const Section& xi, const ConnParams& c) {
  std::map<int, FieldExpr> out;
  for (const auto& [k, f] : xi.slots()) out.emplace(k, scale(derivative(f), c.alpha));
  return Section(std::move(out));
}

inline Section nabla2(const Section& xi, const ConnParams& c) {
  std::map<int, FieldExpr> out;
  for (const auto& [k, f] : xi.slots()) {
    const FieldExpr m = scale(variable(), c.beta) + constant(c.gamma * static_cast<double>(k));
    out.emplace(k, multiply(m, f));
  }
  return Section(std::move(out));
}

/// (nabla1 nabla2 - nabla2 nabla1) xi.
inline Section curvature_apply(const Section& xi, const ConnParams& c) {
  return nabla1(nabla2(xi, c), c) - nabla2(nabla1(xi, c), c);
}

/// Least-squares ratio of curvature_apply(xi) to xi over sampled points where xi is not small.
inline cplx measure_curvature(const Section& xi, const ConnParams& c, double lo = -6.0,
                              double hi = 6.0, int points = 1001) {
  const Section F = curvature_apply(xi, c);
  cplx num = 0.0;
  double den = 0.0;
  for (const auto& [k, f] : xi.slots()) {
    const FieldExpr g = F.slot(k);
    for (int i = 0; i < points; ++i) {
      const double x = lo + (hi - lo) * i / (points - 1);
      const cplx a = eval(f, x);
      num += std::conj(a) * eval(g, x);
      den += std::norm(a);
    }
  }
  if (den == 0.0) throw InvalidArgument("curvature measurement needs a nonzero section");
  return num / den;
}

struct LeibnizReport {
  double nabla1 = 0.0;
  double nabla2 = 0.0;
  double max() const { return std::max(nabla1, nabla2); }
};

/// Max over random (f, xi) of |nabla_k(f xi) - f nabla_k xi - (d_k f) xi|.
inline LeibnizReport check_left_leibniz(const ConnParams& c, const LeftParams& p, int trials,
                                        std::uint64_t seed = 7, const QuadratureConfig& cfg = {}) {
  if (p.lambda0 == 0.0) throw ZeroLambda0("lambda0 must be nonzero");
  Rng rng(seed);
  LeibnizReport rep;
  for (int t = 0; t < trials; ++t) {
    const CylinderElement f = random_element(rng, p.hbar);
    const Section xi = random_section(rng);
    const Section fxi = left_act(f, xi, p);
    rep.nabla1 = std::max(rep.nabla1,
                          section_distance(nabla1(fxi, c),
                                           left_act(f, nabla1(xi, c), p) + left_act(d1(f), xi, p), cfg));
    rep.nabla2 = std::max(rep.nabla2,
                          section_distance(nabla2(fxi, c),
                                           left_act(f, nabla2(xi, c), p) + left_act(d2(f), xi, p), cfg));
  }
  return rep;
}

/// Max over random (xi, f) of |nabla_k(xi f) - (nabla_k xi) f - xi (d_k f)|.
inline LeibnizReport check_right_leibniz(const ConnParams& c, const RightParams& q, int trials,
                                         std::uint64_t seed = 11, const QuadratureConfig& cfg = {}) {
  Rng rng(seed);
  LeibnizReport rep;
  for (int t = 0; t < trials; ++t) {
    const CylinderElement f = random_element(rng, q.hbarP);
    const Section xi = random_section(rng);
    const Section xif = right_act(xi, f, q);
    rep.nabla1 = std::max(rep.nabla1,
                          section_distance(nabla1(xif, c),
                                           right_act(nabla1(xi, c), f, q) + right_act(xi, d1(f), q), cfg));
    rep.nabla2 = std::max(rep.nabla2,
                          section_distance(nabla2(xif, c),
                                           right_act(nabla2(xi, c), f, q) + right_act(xi, d2(f), q), cfg));
  }
  return rep;
}

/// delta_1 = alpha mu0 d1, delta_2 = ((beta epsP + gamma rP) / 2 pi i) d2.
inline CylinderElement induced_derivation(const CylinderElement& f, int k, const ConnParams& c,
                                          const BimoduleParams& b) {
  if (k == 1) return scale(d1(f), c.alpha * b.right.mu0);
  if (k == 2) return scale(d2(f), (c.beta * b.right.epsP + c.gamma * static_cast<double>(b.right.rP)) / kTwoPiI);
  throw InvalidArgument("derivation index must be 1 or 2");
}

/// |xi delta_k(f) - nabla_k(xi f) + (nabla_k xi) f| for one (xi, f).
inline double induced_derivation_residual(const Section& xi, const CylinderElement& f, int k,
                                          const ConnParams& c, const BimoduleParams& b,
                                          const QuadratureConfig& cfg = {}) {
  auto nab = [&](const Section& s) { return k == 1 ? nabla1(s, c) : nabla2(s, c); };
  const Section lhs = right_act(xi, induced_derivation(f, k, c, b), b.right);
  const Section rhs = nab(right_act(xi, f, b.right)) - right_act(nab(xi), f, b.right);
  return section_distance(lhs, rhs, cfg);
}

enum class ConnectionCase { Equal, Rational };

struct ConnectionSolution {
  ConnectionCase kind;
  BimoduleParams params;
  ConnParams conn;
  cplx curvature;
};

/// Bimodule parameters and a connection satisfying left and right Leibniz rules.
/// Equal hbar: beta = 0 and the curvature vanishes. Otherwise hbar rP = hbarP r is required and
/// the curvature is 2 pi i (hbar - hbarP) / (hbar hbarP).
inline ConnectionSolution solve_bimodule_connection(double hbar, double hbarP, double lambda0,
                                                    double lambda1, int r, int rP) {
  if (!(hbar > 0) || !(hbarP > 0)) throw DegenerateCase("hbar and hbarP must be positive");
  if (lambda0 == 0.0) throw DegenerateCase("lambda0 must be nonzero");
  if (r == 0 || rP == 0) throw DegenerateCase("r and rP must be nonzero");
  ConnectionSolution s;
  const double eps = -(hbar + lambda1 * r) / lambda0;
  const double epsP = -lambda1 * rP / lambda0;
  const bool equal = std::abs(hbar - hbarP) <= 1e-12 * std::max(hbar, hbarP);
  if (equal) {
    if (r != rP) throw DegenerateCase("equal hbar requires r = rP");
    s.kind = ConnectionCase::Equal;
    s.params.left = {lambda0, lambda1, eps, r, hbar};
    s.params.right = {lambda0, lambda1 + hbar / r, epsP, rP, hbar};
    s.conn = {1.0 / lambda0, 0.0, kTwoPiI / static_cast<double>(r)};
    s.curvature = s.conn.alpha * s.conn.beta;
    return s;
  }
  if (std::abs(hbar * rP - hbarP * r) > 1e-10 * std::max(hbar, hbarP))
    throw RatioNotRational("hbar/hbarP = " + std::to_string(hbar / hbarP) + " differs from r/rP = " +
                           std::to_string(r) + "/" + std::to_string(rP));
  if (r == rP) throw DegenerateCase("distinct hbar requires r != rP");
  s.kind = ConnectionCase::Rational;
  const double mu1 = (hbarP - hbar) / (rP - r) + lambda1;
  const double q = (hbar - hbarP) / (hbar * hbarP);
  s.params.left = {lambda0, lambda1, eps, r, hbar};
  s.params.right = {lambda0, mu1, epsP, rP, hbarP};
  s.conn = {1.0 / lambda0, kTwoPiI * lambda0 * q, kTwoPiI / static_cast<double>(rP) + kTwoPiI * lambda1 * q};
  s.curvature = s.conn.alpha * s.conn.beta;
  return s;
}

/// Equal-hbar solution parametrized by eps != epsP.
inline ConnectionSolution solve_bimodule_connection_equal(double hbar, double eps, double epsP, int r) {
  if (r == 0) throw DegenerateCase("r must be nonzero");
  if (eps == epsP) throw DegenerateCase("equal-hbar case requires eps != epsP");
  const double lambda0 = hbar / (epsP - eps);
  const double lambda1 = -hbar * epsP / (r * (epsP - eps));
  return solve_bimodule_connection(hbar, hbar, lambda0, lambda1, r, r);
}

/// alpha = 1/lambda0, beta = lambda0 R, gamma = (2 pi i - lambda0 eps R) / r; curvature R.
inline ConnParams constant_curvature_connection(const LeftParams& p, cplx R) {
  if (p.lambda0 == 0.0) throw ZeroLambda0("lambda0 must be nonzero");
  if (p.r == 0) throw ZeroR("r must be nonzero");
  return {1.0 / p.lambda0, p.lambda0 * R, (kTwoPiI - p.lambda0 * p.eps * R) / static_cast<double>(p.r)};
}

/// (d1 f, d2 f + alpha beta f u); requires r = 1 and a connection satisfying left Leibniz.
inline std::pair<CylinderElement, CylinderElement> induced_algebra_connection(
    const CylinderElement& f, const ConnParams& c, const LeftParams& p) {
  if (p.r != 1) throw InvalidArgument("induced algebra connection requires r = 1");
  if (p.lambda0 == 0.0) throw ZeroLambda0("lambda0 must be nonzero");
  if (std::abs(c.alpha * p.lambda0 - 1.0) > 1e-12 || std::abs(c.beta * p.eps + c.gamma - kTwoPiI) > 1e-12)
    throw InvalidArgument("connection does not satisfy alpha = 1/lambda0 and beta eps + gamma r = 2 pi i");
  return {d1(f), d2(f) + scale(right_multiply_u(f), c.alpha * c.beta)};
}

}  // namespace nccyl
