#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "nccyl/cylinder.hpp"
#include "nccyl/error.hpp"
#include "nccyl/field_expr.hpp"

namespace nccyl {

/// A smooth rise from 0 at s = 0 to 1 at s = 1, with complement(s) = 1 - up(s) = up(1 - s).
struct Transition {
  FieldExpr up;
  FieldExpr complement;
};

inline Transition default_transition() {
  const FieldExpr s = variable();
  return {smooth_step(s), smooth_step(constant(1.0) - s)};
}

/// The default step precomposed with s -> 3s^2 - 2s^3.
inline Transition cubic_transition() {
  const FieldExpr s = variable();
  const FieldExpr q = scale(power(s, 2), 3.0) - scale(power(s, 3), 2.0);
  return {smooth_step(q), smooth_step(constant(1.0) - q)};
}

struct BumpPair {
  double hbar;
  FieldExpr f;  // supported in [0, 2 hbar]
  FieldExpr g;  // supported in [hbar, 2 hbar], g^2 = f - f^2 there
};

inline BumpPair build_bump_pair(double hbar, const Transition& tr = default_transition()) {
  if (!(hbar > 0)) throw InvalidArgument("hbar must be positive");
  const FieldExpr rise = affine(tr.up, 1.0 / hbar, 0.0);
  const FieldExpr fall_up = affine(tr.up, 1.0 / hbar, -1.0);
  const FieldExpr fall = affine(tr.complement, 1.0 / hbar, -1.0);
  BumpPair p{hbar, piecewise({{0.0, hbar, rise}, {hbar, 2.0 * hbar, fall}}),
             piecewise({{hbar, 2.0 * hbar, sqrt_nonneg(multiply(fall_up, fall))}})};
  return p;
}

/// f_n and g_n: sums of the n copies translated by 2 k hbar, k = 0 .. n-1.
inline std::pair<FieldExpr, FieldExpr> build_fn_gn(const BumpPair& pair, int n) {
  if (n < 1) throw InvalidArgument("n must be at least 1");
  std::vector<FieldExpr> fs, gs;
  for (int k = 0; k < n; ++k) {
    fs.push_back(shift(pair.f, -2.0 * k * pair.hbar));
    gs.push_back(shift(pair.g, -2.0 * k * pair.hbar));
  }
  return {sum(fs), sum(gs)};
}

struct ProjectionFamilyElement {
  int n;
  BumpPair pair;
  CylinderElement element;
};

inline ProjectionFamilyElement build_pn(const BumpPair& pair, int n) {
  auto [fn, gn] = build_fn_gn(pair, n);
  CylinderElement e(pair.hbar, {{1, shift(gn, pair.hbar)}, {0, fn}, {-1, gn}});
  return {n, pair, std::move(e)};
}

inline ProjectionFamilyElement build_pn(double hbar, int n) { return build_pn(build_bump_pair(hbar), n); }

inline cplx trace_pn(const ProjectionFamilyElement& p, const QuadratureConfig& cfg = {}) {
  return trace(p.element, cfg);
}

inline cplx chern_number(const ProjectionFamilyElement& p, const QuadratureConfig& cfg = {}) {
  return cocycle_psi(p.element, p.element, p.element, cfg);
}

/// W^{-2n} p W^{2n}: every coefficient translated by 2 n hbar to the right.
inline CylinderElement shifted_projection(const ProjectionFamilyElement& pm, int n) {
  if (n < 1) throw InvalidArgument("n must be at least 1");
  std::map<int, FieldExpr> out;
  for (const auto& [j, c] : pm.element.coeffs()) out.emplace(j, shift(c, -2.0 * n * pm.pair.hbar));
  return CylinderElement(pm.element.hbar(), std::move(out));
}

struct ProjectorResiduals {
  double gg_shift = 0.0;     // g(u) g(u + hbar)
  double g_one_minus = 0.0;  // g(u) (1 - f(u) - f(u - hbar))
  double gg_ff = 0.0;        // g(u)^2 + g(u + hbar)^2 - f(u) + f(u)^2
};

/// Pointwise residuals of the three scalar conditions equivalent to p^2 = p.
inline ProjectorResiduals projector_residuals(const FieldExpr& f, const FieldExpr& g, double hbar,
                                              double lo, double hi, int points = 10000) {
  ProjectorResiduals r;
  for (int i = 0; i < points; ++i) {
    const double u = lo + (hi - lo) * i / (points - 1);
    const cplx gu = eval(g, u), gs = eval(g, u + hbar), fu = eval(f, u), fm = eval(f, u - hbar);
    r.gg_shift = std::max(r.gg_shift, std::abs(gu * gs));
    r.g_one_minus = std::max(r.g_one_minus, std::abs(gu * (1.0 - fu - fm)));
    r.gg_ff = std::max(r.gg_ff, std::abs(gu * gu + gs * gs - fu + fu * fu));
  }
  return r;
}

}  // namespace nccyl
