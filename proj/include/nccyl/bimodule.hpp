#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nccyl/cylinder.hpp"
#include "nccyl/error.hpp"
#include "nccyl/field_expr.hpp"
#include "nccyl/quadrature.hpp"

namespace nccyl {

/// Schwartz section xi(x, k): finitely many slots k, each a function of x.
class Section {
 public:
  Section() = default;
  explicit Section(std::map<int, FieldExpr> slots) {
    for (auto& [k, f] : slots)
      if (!f.is_zero()) slots_.emplace(k, std::move(f));
  }

  const std::map<int, FieldExpr>& slots() const { return slots_; }
  bool is_zero() const { return slots_.empty(); }

  FieldExpr slot(int k) const {
    auto it = slots_.find(k);
    return it == slots_.end() ? zero() : it->second;
  }

 private:
  std::map<int, FieldExpr> slots_;
};

namespace detail {

inline Section collect(std::map<int, std::vector<FieldExpr>>& terms) {
  std::map<int, FieldExpr> out;
  for (auto& [k, ts] : terms) out.emplace(k, sum(ts));
  return Section(std::move(out));
}

inline bool close(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace detail

inline Section add(const Section& a, const Section& b) {
  std::map<int, std::vector<FieldExpr>> t;
  for (const auto& [k, f] : a.slots()) t[k].push_back(f);
  for (const auto& [k, f] : b.slots()) t[k].push_back(f);
  return detail::collect(t);
}

inline Section scale(const Section& a, cplx c) {
  std::map<int, FieldExpr> out;
  for (const auto& [k, f] : a.slots()) out.emplace(k, scale(f, c));
  return Section(std::move(out));
}

inline Section subtract(const Section& a, const Section& b) { return add(a, scale(b, -1.0)); }

inline Section operator+(const Section& a, const Section& b) { return add(a, b); }
inline Section operator-(const Section& a, const Section& b) { return subtract(a, b); }

/// Left action parameters; lambda0 eps + lambda1 r = -hbar.
struct LeftParams {
  double lambda0 = 1.0;
  double lambda1 = 0.0;
  double eps = 0.0;
  int r = 1;
  double hbar = 1.0;

  double residual() const { return lambda0 * eps + lambda1 * r + hbar; }
  void validate() const {
    if (!(std::abs(residual()) <= 1e-12 * std::max({1.0, std::abs(hbar), std::abs(lambda0 * eps)})))
      throw InvalidArgument("left parameters violate lambda0*eps + lambda1*r = -hbar (residual " +
                            std::to_string(residual()) + ")");
  }
};

/// Right action parameters; mu0 epsP + mu1 rP = hbarP.
struct RightParams {
  double mu0 = 1.0;
  double mu1 = 0.0;
  double epsP = 0.0;
  int rP = 1;
  double hbarP = 1.0;

  double residual() const { return mu0 * epsP + mu1 * rP - hbarP; }
  void validate() const {
    if (!(std::abs(residual()) <= 1e-12 * std::max({1.0, std::abs(hbarP), std::abs(mu0 * epsP)})))
      throw InvalidArgument("right parameters violate mu0*epsP + mu1*rP = hbarP (residual " +
                            std::to_string(residual()) + ")");
  }
};

struct BimoduleResiduals {
  double left;   // lambda0 eps + lambda1 r + hbar
  double right;  // mu0 epsP + mu1 rP - hbarP
  double cross_left;   // lambda0 epsP + lambda1 rP
  double cross_right;  // mu0 eps + mu1 r
  double max_abs() const {
    return std::max({std::abs(left), std::abs(right), std::abs(cross_left), std::abs(cross_right)});
  }
};

struct BimoduleParams {
  LeftParams left;
  RightParams right;

  BimoduleResiduals residuals() const {
    return {left.residual(), right.residual(),
            left.lambda0 * right.epsP + left.lambda1 * right.rP,
            right.mu0 * left.eps + right.mu1 * left.r};
  }

  void validate() const {
    const double scale = std::max({1.0, std::abs(left.hbar), std::abs(right.hbarP),
                                   std::abs(left.lambda0 * right.epsP),
                                   std::abs(right.mu0 * left.eps)});
    if (!(residuals().max_abs() <= 1e-12 * scale))
      throw InvalidArgument("bimodule parameter constraints violated (max residual " +
                            std::to_string(residuals().max_abs()) + ")");
  }
};

/// (f xi)(x, k) = sum_n f_n(lambda0 x + lambda1 k) xi(x - n eps, k - n r).
inline Section left_act(const CylinderElement& f, const Section& xi, const LeftParams& p) {
  require_same_hbar(f.hbar(), p.hbar);
  std::map<int, std::vector<FieldExpr>> t;
  for (const auto& [n, fn] : f.coeffs()) {
    for (const auto& [j, xj] : xi.slots()) {
      const int k = j + n * p.r;
      t[k].push_back(multiply(affine(fn, p.lambda0, p.lambda1 * k), shift(xj, -n * p.eps)));
    }
  }
  return detail::collect(t);
}

/// (xi f)(x, k) = sum_n f_n(mu0 x + mu1 k - n hbarP) xi(x - n epsP, k - n rP).
inline Section right_act(const Section& xi, const CylinderElement& f, const RightParams& q) {
  require_same_hbar(f.hbar(), q.hbarP);
  std::map<int, std::vector<FieldExpr>> t;
  for (const auto& [n, fn] : f.coeffs()) {
    for (const auto& [j, xj] : xi.slots()) {
      const int k = j + n * q.rP;
      t[k].push_back(
          multiply(affine(fn, q.mu0, q.mu1 * k - n * q.hbarP), shift(xj, -n * q.epsP)));
    }
  }
  return detail::collect(t);
}

/// sum_k integral xi(x, k) conj(eta(x, k)) dx.
inline cplx inner_L(const Section& xi, const Section& eta, const QuadratureConfig& cfg = {}) {
  cplx s = 0.0;
  for (const auto& [k, a] : xi.slots()) {
    auto it = eta.slots().find(k);
    if (it == eta.slots().end()) continue;
    s += integrate(multiply(a, conjugate(it->second)), cfg);
  }
  return s;
}

inline cplx inner_R(const Section& xi, const Section& eta, const QuadratureConfig& cfg = {}) {
  return std::conj(inner_L(xi, eta, cfg));
}

inline double section_distance(const Section& a, const Section& b, const QuadratureConfig& cfg = {}) {
  std::set<int> ks;
  for (const auto& [k, f] : a.slots()) ks.insert(k);
  for (const auto& [k, f] : b.slots()) ks.insert(k);
  double d = 0.0;
  for (int k : ks) d += coefficient_distance(a.slot(k), b.slot(k), cfg);
  return d;
}

inline BimoduleParams default_bimodule_params(double hbar, double hbarP, double eps, double epsP,
                                              int r, int rP) {
  const double D = eps * rP - epsP * r;
  if (D == 0.0 || std::abs(D) <= 1e-14 * std::max(std::abs(eps * rP), std::abs(epsP * r)))
    throw DegenerateParams("eps*rP equals epsP*r; the parameter system is singular");
  BimoduleParams b;
  b.left = {-hbar * rP / D, hbar * epsP / D, eps, r, hbar};
  b.right = {-hbarP * r / D, hbarP * eps / D, epsP, rP, hbarP};
  return b;
}

/// xi(tau x, k).
inline Section param_iso(const Section& xi, double tau) {
  if (tau == 0.0) throw ZeroTau("tau must be nonzero");
  std::map<int, FieldExpr> out;
  for (const auto& [k, f] : xi.slots()) out.emplace(k, affine(f, tau, 0.0));
  return Section(std::move(out));
}

/// Parameters of the module that param_iso(., tau) maps into.
inline LeftParams scaled_left_params(const LeftParams& p, double tau) {
  if (tau == 0.0) throw ZeroTau("tau must be nonzero");
  return {p.lambda0 * tau, p.lambda1, p.eps / tau, p.r, p.hbar};
}

/// Floor division k = k0 r + k1 with 0 <= k1 < r.
inline std::pair<int, int> floor_divmod(int k, int r) {
  int q = k / r;
  int m = k % r;
  if (m < 0) {
    m += r;
    --q;
  }
  return {q, m};
}

/// phi(F)(x, k) = F^{k1}_{k0}(lambda0 x + lambda1 k).
inline Section phi_to_section(const std::vector<CylinderElement>& F, const LeftParams& p) {
  if (p.lambda0 == 0.0) throw ZeroLambda0("lambda0 must be nonzero");
  if (p.r < 1) throw InvalidArgument("phi requires r >= 1");
  if (static_cast<int>(F.size()) != p.r)
    throw InvalidArgument("phi expects exactly r components");
  std::map<int, FieldExpr> out;
  for (int j = 0; j < p.r; ++j) {
    require_same_hbar(F[j].hbar(), p.hbar);
    for (const auto& [n, c] : F[j].coeffs()) {
      const int k = n * p.r + j;
      out.emplace(k, affine(c, p.lambda0, p.lambda1 * k));
    }
  }
  return Section(std::move(out));
}

/// F^j = sum_n xi((u - lambda1 (n r + j)) / lambda0, n r + j) W^n.
inline std::vector<CylinderElement> phi_inverse(const Section& xi, const LeftParams& p) {
  if (p.lambda0 == 0.0) throw ZeroLambda0("lambda0 must be nonzero");
  if (p.r < 1) throw InvalidArgument("phi requires r >= 1");
  std::vector<std::map<int, FieldExpr>> comps(p.r);
  for (const auto& [k, f] : xi.slots()) {
    const auto [n, j] = floor_divmod(k, p.r);
    comps[j].emplace(n, affine(f, 1.0 / p.lambda0, -p.lambda1 * k / p.lambda0));
  }
  std::vector<CylinderElement> out;
  for (auto& c : comps) out.emplace_back(p.hbar, std::move(c));
  return out;
}

/// Left hermitian structure: mode n at u is
/// (1/|lambda0|) sum_k xi_k(x_k) conj(eta_{k - n r}(x_k - n eps)), x_k = (u - lambda1 k) / lambda0.
inline CylinderElement herm_L(const Section& xi, const Section& eta, const BimoduleParams& b) {
  const LeftParams& p = b.left;
  if (p.lambda0 == 0.0) throw ZeroLambda0("lambda0 must be nonzero");
  if (p.r == 0) throw ZeroR("herm_L needs r != 0 for a finite mode expansion");
  std::map<int, std::vector<FieldExpr>> t;
  const double s = 1.0 / p.lambda0;
  for (const auto& [k, a] : xi.slots()) {
    const double c = -p.lambda1 * k / p.lambda0;
    for (const auto& [j, e] : eta.slots()) {
      if ((k - j) % p.r != 0) continue;
      const int n = (k - j) / p.r;
      t[n].push_back(multiply(affine(a, s, c), conjugate(affine(e, s, c - n * p.eps))));
    }
  }
  std::map<int, FieldExpr> out;
  for (auto& [n, ts] : t) out.emplace(n, scale(sum(ts), 1.0 / std::abs(p.lambda0)));
  return CylinderElement(p.hbar, std::move(out));
}

/// Right hermitian structure: mode n at u is
/// (1/|mu0|) sum_k conj(xi_{k - n rP}(y_k - n epsP)) eta_k(y_k), y_k = (u - mu1 k + n hbarP) / mu0.
inline CylinderElement herm_R(const Section& xi, const Section& eta, const BimoduleParams& b) {
  const RightParams& q = b.right;
  if (q.mu0 == 0.0) throw ZeroMu0("mu0 must be nonzero");
  if (q.rP == 0) throw ZeroR("herm_R needs rP != 0 for a finite mode expansion");
  std::map<int, std::vector<FieldExpr>> t;
  const double s = 1.0 / q.mu0;
  for (const auto& [k, e] : eta.slots()) {
    for (const auto& [j, a] : xi.slots()) {
      if ((k - j) % q.rP != 0) continue;
      const int n = (k - j) / q.rP;
      const double c = (n * q.hbarP - q.mu1 * k) / q.mu0;
      t[n].push_back(multiply(conjugate(affine(a, s, c - n * q.epsP)), affine(e, s, c)));
    }
  }
  std::map<int, FieldExpr> out;
  for (auto& [n, ts] : t) out.emplace(n, scale(sum(ts), 1.0 / std::abs(q.mu0)));
  return CylinderElement(q.hbarP, std::move(out));
}

}  // namespace nccyl
