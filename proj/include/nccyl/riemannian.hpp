#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "nccyl/cylinder.hpp"
#include "nccyl/error.hpp"
#include "nccyl/field_expr.hpp"
#include "nccyl/quadrature.hpp"

namespace nccyl {

using Matrix2 = std::array<std::array<FieldExpr, 2>, 2>;
using Christoffel = std::array<Matrix2, 2>;  // gamma[l][i][j] = Gamma^l_{ij}
using Riemann = std::array<std::array<Matrix2, 2>, 2>;  // R[m][b][c][d]

/// Real symmetric 2x2 metric with u-only components.
struct Metric {
  Matrix2 h;
};

inline Metric conformal_metric(const FieldExpr& k) {
  const FieldExpr e = exponential(scale(k, 2.0));
  return {{{{e, zero()}, {zero(), e}}}};
}

inline FieldExpr metric_det(const Metric& m) {
  return m.h[0][0] * m.h[1][1] - m.h[0][1] * m.h[1][0];
}

/// Symmetry, reality and |det| >= 1e-12 on a sampled grid.
inline void validate_metric(const Metric& m, double lo = -10.0, double hi = 10.0, int points = 201) {
  const FieldExpr det = metric_det(m);
  for (int i = 0; i < points; ++i) {
    const double u = lo + (hi - lo) * i / (points - 1);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const cplx v = eval(m.h[a][b], u);
        if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v)))
          throw InvalidArgument("metric component is not real at u = " + std::to_string(u));
        if (std::abs(v - eval(m.h[b][a], u)) > 1e-12 * std::max(1.0, std::abs(v)))
          throw InvalidArgument("metric is not symmetric at u = " + std::to_string(u));
      }
    if (std::abs(eval(det, u)) < 1e-12) throw SingularMetric("|det h| < 1e-12 at u = " + std::to_string(u));
  }
}

/// Pointwise inverse h^{ij}.
inline Matrix2 metric_inverse(const Metric& m) {
  FieldExpr det = metric_det(m);
  double sign = 1.0;
  const double d0 = eval(det, 0.0).real();
  if (d0 == 0.0) throw SingularMetric("det h vanishes at u = 0");
  if (d0 < 0) {
    sign = -1.0;
    det = scale(det, -1.0);
  }
  auto over = [&](const FieldExpr& n, double s) { return ratio_power(scale(n, s * sign), det, 1.0); };
  return {{{over(m.h[1][1], 1.0), over(m.h[0][1], -1.0)},
           {over(m.h[1][0], -1.0), over(m.h[0][0], 1.0)}}};
}

/// Partial derivative along the derivation with index i (0: d1, 1: d2) of a u-only component.
inline FieldExpr partial(int i, const FieldExpr& f) {
  const CylinderElement e = CylinderElement::mode(1.0, 0, f);
  return (i == 0 ? d1(e) : d2(e)).coeff(0);
}

/// Koszul formula: Gamma^l_{ij} = 1/2 h^{lk} (d_i h_{jk} + d_j h_{ki} - d_k h_{ij}).
inline Christoffel christoffel(const Metric& m) {
  validate_metric(m);
  const Matrix2 inv = metric_inverse(m);
  Christoffel g;
  for (int l = 0; l < 2; ++l)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        std::vector<FieldExpr> terms;
        for (int k = 0; k < 2; ++k) {
          const FieldExpr koszul = partial(i, m.h[j][k]) + partial(j, m.h[k][i]) - partial(k, m.h[i][j]);
          terms.push_back(multiply(inv[l][k], koszul));
        }
        g[l][i][j] = scale(sum(terms), 0.5);
      }
  return g;
}

struct CompatibilityReport {
  double metric = 0.0;   // d_i h_jk - Gamma^l_ij h_lk - h_jl Gamma^l_ik
  double torsion = 0.0;  // Gamma^l_ij - Gamma^l_ji
  double max() const { return std::max(metric, torsion); }
};

inline CompatibilityReport verify_pseudo_riemannian(const Metric& m, const Christoffel& g,
                                                    double lo = -5.0, double hi = 5.0, int points = 1001) {
  CompatibilityReport r;
  std::array<std::array<std::array<FieldExpr, 2>, 2>, 2> dh;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) dh[i][j][k] = partial(i, m.h[j][k]);
  for (int p = 0; p < points; ++p) {
    const double u = lo + (hi - lo) * p / (points - 1);
    cplx G[2][2][2], H[2][2];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        H[a][b] = eval(m.h[a][b], u);
        for (int c = 0; c < 2; ++c) G[a][b][c] = eval(g[a][b][c], u);
      }
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          cplx res = eval(dh[i][j][k], u);
          for (int l = 0; l < 2; ++l) res -= G[l][i][j] * H[l][k] + H[j][l] * G[l][i][k];
          r.metric = std::max(r.metric, std::abs(res));
          r.torsion = std::max(r.torsion, std::abs(G[k][i][j] - G[k][j][i]));
        }
  }
  return r;
}

struct CurvatureReport {
  Riemann riemann;   // R(d_c, d_d) e_b = e_m riemann[m][b][c][d]
  FieldExpr R1212;   // h(e_1, R(d_1, d_2) e_2)
  FieldExpr gaussian;
};

inline CurvatureReport curvature_tensor(const Metric& m, const Christoffel& g) {
  const Matrix2 inv = metric_inverse(m);
  CurvatureReport rep;
  for (int mm = 0; mm < 2; ++mm)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          std::vector<FieldExpr> t = {partial(c, g[mm][d][b]), scale(partial(d, g[mm][c][b]), -1.0)};
          for (int l = 0; l < 2; ++l) {
            t.push_back(multiply(g[mm][c][l], g[l][d][b]));
            t.push_back(scale(multiply(g[mm][d][l], g[l][c][b]), -1.0));
          }
          rep.riemann[mm][b][c][d] = sum(t);
        }
  // R_{ikjl} = h(e_i, R(d_j, d_l) e_k)
  auto lowered = [&](int i, int k, int j, int l) {
    return m.h[i][0] * rep.riemann[0][k][j][l] + m.h[i][1] * rep.riemann[1][k][j][l];
  };
  rep.R1212 = lowered(0, 1, 0, 1);
  std::vector<FieldExpr> terms;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          terms.push_back(product({inv[i][j], lowered(i, k, j, l), inv[k][l]}));
  rep.gaussian = scale(sum(terms), 0.5);
  return rep;
}

struct TotalCurvature {
  cplx total;            // integral of K e^{2k} over [-U, U]
  double slope_formula;  // k'(-U) - k'(U)
  double U;
};

/// Conformal total curvature with the boundary-slope cross-check.
inline TotalCurvature total_curvature(const FieldExpr& k, const CurvatureReport& rep,
                                      const QuadratureConfig& cfg = {}) {
  const FieldExpr dk = derivative(k);
  const std::array<double, 3> Us = {10.0, 20.0, 40.0};
  double U = 0.0;
  for (std::size_t i = 0; i + 1 < Us.size(); ++i) {
    const double a = Us[i], b = Us[i + 1];
    if (std::abs(eval(dk, a) - eval(dk, b)) < 1e-8 && std::abs(eval(dk, -a) - eval(dk, -b)) < 1e-8) {
      U = b;
      break;
    }
  }
  if (U == 0.0) throw NonConvergent("k' has no stable limits at +-10, +-20, +-40");
  const FieldExpr density = multiply(rep.gaussian, exponential(scale(k, 2.0)));
  TotalCurvature t;
  t.total = integrate(density, -U, U, cfg);
  t.slope_formula = (eval(dk, -U) - eval(dk, U)).real();
  t.U = U;
  return t;
}

inline TotalCurvature total_curvature(const FieldExpr& k, const QuadratureConfig& cfg = {}) {
  const Metric m = conformal_metric(k);
  return total_curvature(k, curvature_tensor(m, christoffel(m)), cfg);
}

struct PerturbationResult {
  TotalCurvature base;
  TotalCurvature perturbed;
  bool precondition_holds;  // delta' has equal limits at +-infinity
};

inline PerturbationResult perturbation_invariance(const FieldExpr& k, const FieldExpr& delta,
                                                  const QuadratureConfig& cfg = {}) {
  const FieldExpr dd = derivative(delta);
  PerturbationResult r;
  r.precondition_holds = std::abs(eval(dd, 40.0) - eval(dd, -40.0)) < 1e-8;
  r.base = total_curvature(k, cfg);
  r.perturbed = total_curvature(k + delta, cfg);
  return r;
}

}  // namespace nccyl
