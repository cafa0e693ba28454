#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "nccyl/error.hpp"
#include "nccyl/field_expr.hpp"
#include "nccyl/quadrature.hpp"

namespace nccyl {

inline constexpr cplx kTwoPiI{0.0, 2.0 * std::numbers::pi};

enum class DecayClass { SchwartzLike, Extended };

/// Finite sum of f_n(u) W^n with deformation parameter hbar. W^n f(u) = f(u + n hbar) W^n.
class CylinderElement {
 public:
  explicit CylinderElement(double hbar = 0.5) : hbar_(hbar) { check_hbar(); }

  CylinderElement(double hbar, std::map<int, FieldExpr> coeffs,
                  std::optional<DecayClass> decay = std::nullopt)
      : hbar_(hbar) {
    check_hbar();
    for (auto& [n, f] : coeffs)
      if (!f.is_zero()) coeffs_.emplace(n, std::move(f));
    decay_ = infer();
    if (decay && *decay == DecayClass::Extended) decay_ = DecayClass::Extended;
  }

  static CylinderElement mode(double hbar, int n, FieldExpr f) {
    return CylinderElement(hbar, {{n, std::move(f)}});
  }

  double hbar() const { return hbar_; }
  const std::map<int, FieldExpr>& coeffs() const { return coeffs_; }
  DecayClass decay_class() const { return decay_; }
  bool is_zero() const { return coeffs_.empty(); }

  FieldExpr coeff(int n) const {
    auto it = coeffs_.find(n);
    return it == coeffs_.end() ? zero() : it->second;
  }

  std::vector<int> modes() const {
    std::vector<int> out;
    for (const auto& [n, f] : coeffs_) out.push_back(n);
    return out;
  }

  CylinderElement with_decay(DecayClass d) const {
    CylinderElement e = *this;
    if (d == DecayClass::Extended) e.decay_ = d;
    return e;
  }

 private:
  void check_hbar() const {
    if (!(hbar_ > 0) || !std::isfinite(hbar_)) throw InvalidArgument("hbar must be positive");
  }

  DecayClass infer() const {
    for (const auto& [n, f] : coeffs_)
      if (!f.support().integrable()) return DecayClass::Extended;
    return DecayClass::SchwartzLike;
  }

  double hbar_;
  std::map<int, FieldExpr> coeffs_;
  DecayClass decay_ = DecayClass::SchwartzLike;
};

inline void require_same_hbar(double a, double b) {
  if (std::abs(a - b) > 1e-12 * std::max(std::abs(a), std::abs(b)))
    throw HbarMismatch("hbar mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

namespace detail {

inline DecayClass join(DecayClass a, DecayClass b) {
  return (a == DecayClass::Extended || b == DecayClass::Extended) ? DecayClass::Extended
                                                                  : DecayClass::SchwartzLike;
}

}  // namespace detail

inline CylinderElement add(const CylinderElement& f, const CylinderElement& g) {
  require_same_hbar(f.hbar(), g.hbar());
  std::map<int, std::vector<FieldExpr>> terms;
  for (const auto& [n, c] : f.coeffs()) terms[n].push_back(c);
  for (const auto& [n, c] : g.coeffs()) terms[n].push_back(c);
  std::map<int, FieldExpr> out;
  for (auto& [n, ts] : terms) out.emplace(n, sum(ts));
  return CylinderElement(f.hbar(), std::move(out), detail::join(f.decay_class(), g.decay_class()));
}

inline CylinderElement scale(const CylinderElement& f, cplx c) {
  std::map<int, FieldExpr> out;
  for (const auto& [n, a] : f.coeffs()) out.emplace(n, scale(a, c));
  return CylinderElement(f.hbar(), std::move(out), f.decay_class());
}

inline CylinderElement subtract(const CylinderElement& f, const CylinderElement& g) {
  return add(f, scale(g, -1.0));
}

/// Coefficient n of f g: sum over k of f_k(u) g_{n-k}(u + k hbar).
inline FieldExpr product_mode(const CylinderElement& f, const CylinderElement& g, int n) {
  require_same_hbar(f.hbar(), g.hbar());
  std::vector<FieldExpr> terms;
  for (const auto& [k, fk] : f.coeffs()) {
    auto it = g.coeffs().find(n - k);
    if (it == g.coeffs().end()) continue;
    terms.push_back(multiply(fk, shift(it->second, k * f.hbar())));
  }
  return sum(terms);
}

inline CylinderElement multiply(const CylinderElement& f, const CylinderElement& g) {
  require_same_hbar(f.hbar(), g.hbar());
  std::set<int> modes;
  for (const auto& [k, a] : f.coeffs())
    for (const auto& [j, b] : g.coeffs()) modes.insert(k + j);
  std::map<int, FieldExpr> out;
  for (int n : modes) out.emplace(n, product_mode(f, g, n));
  return CylinderElement(f.hbar(), std::move(out), detail::join(f.decay_class(), g.decay_class()));
}

/// Coefficient n of a b c without forming the full product.
inline FieldExpr triple_product_mode(const CylinderElement& a, const CylinderElement& b,
                                     const CylinderElement& c, int n) {
  require_same_hbar(a.hbar(), b.hbar());
  require_same_hbar(a.hbar(), c.hbar());
  const double h = a.hbar();
  std::vector<FieldExpr> terms;
  for (const auto& [i, ai] : a.coeffs()) {
    for (const auto& [j, bj] : b.coeffs()) {
      auto it = c.coeffs().find(n - i - j);
      if (it == c.coeffs().end()) continue;
      terms.push_back(product({ai, shift(bj, i * h), shift(it->second, (i + j) * h)}));
    }
  }
  return sum(terms);
}

/// Coefficient n is conj(f_{-n}(u + n hbar)).
inline CylinderElement star(const CylinderElement& f) {
  std::map<int, FieldExpr> out;
  for (const auto& [k, a] : f.coeffs()) out.emplace(-k, conjugate(shift(a, -k * f.hbar())));
  return CylinderElement(f.hbar(), std::move(out), f.decay_class());
}

inline CylinderElement d1(const CylinderElement& f) {
  std::map<int, FieldExpr> out;
  for (const auto& [n, a] : f.coeffs()) out.emplace(n, derivative(a));
  return CylinderElement(f.hbar(), std::move(out), f.decay_class());
}

inline CylinderElement d2(const CylinderElement& f) {
  std::map<int, FieldExpr> out;
  for (const auto& [n, a] : f.coeffs())
    if (n != 0) out.emplace(n, scale(a, kTwoPiI * static_cast<double>(n)));
  return CylinderElement(f.hbar(), std::move(out), f.decay_class());
}

/// f u - u f, coefficient n is n hbar f_n.
inline CylinderElement commutator_with_u(const CylinderElement& f) {
  std::map<int, FieldExpr> out;
  for (const auto& [n, a] : f.coeffs())
    if (n != 0) out.emplace(n, scale(a, n * f.hbar()));
  return CylinderElement(f.hbar(), std::move(out), f.decay_class());
}

/// f u, coefficient n is f_n(u) (u + n hbar).
inline CylinderElement right_multiply_u(const CylinderElement& f) {
  std::map<int, FieldExpr> out;
  for (const auto& [n, a] : f.coeffs()) out.emplace(n, multiply(a, shift(variable(), n * f.hbar())));
  return CylinderElement(f.hbar(), std::move(out), f.decay_class());
}

/// u f, coefficient n is u f_n(u).
inline CylinderElement left_multiply_u(const CylinderElement& f) {
  std::map<int, FieldExpr> out;
  for (const auto& [n, a] : f.coeffs()) out.emplace(n, multiply(variable(), a));
  return CylinderElement(f.hbar(), std::move(out), f.decay_class());
}

inline cplx trace_of_coefficient(const FieldExpr& f0, const QuadratureConfig& cfg) {
  if (f0.is_zero()) return 0.0;
  if (!f0.support().integrable())
    throw NotTraceClass("mode-0 coefficient has unbounded support");
  try {
    return integrate(f0, cfg);
  } catch (const NotIntegrable& e) {
    throw NotTraceClass(e.what());
  }
}

/// Integral of the mode-0 coefficient.
inline cplx trace(const CylinderElement& f, const QuadratureConfig& cfg = {}) {
  return trace_of_coefficient(f.coeff(0), cfg);
}

/// (1 / 2 pi i) trace(f0 d1(f1) d2(f2) - f0 d2(f1) d1(f2)).
inline cplx cocycle_psi(const CylinderElement& f0, const CylinderElement& f1,
                        const CylinderElement& f2, const QuadratureConfig& cfg = {}) {
  require_same_hbar(f0.hbar(), f1.hbar());
  require_same_hbar(f0.hbar(), f2.hbar());
  const FieldExpr a = triple_product_mode(f0, d1(f1), d2(f2), 0);
  const FieldExpr b = triple_product_mode(f0, d2(f1), d1(f2), 0);
  return trace_of_coefficient(a - b, cfg) / kTwoPiI;
}

/// Window used when a coefficient difference has no integrable support hint.
inline constexpr double kDistanceWindow = 20.0;

/// L1 norm plus sampled sup norm of f - g.
inline double coefficient_distance(const FieldExpr& f, const FieldExpr& g,
                                   const QuadratureConfig& cfg = {}) {
  const FieldExpr d = f - g;
  if (d.is_zero()) return 0.0;
  double lo = -kDistanceWindow, hi = kDistanceWindow;
  if (d.support().integrable()) {
    try {
      std::tie(lo, hi) = integration_domain(d, cfg);
    } catch (const NotIntegrable&) {
    }
  }
  if (!(lo < hi)) return 0.0;
  const std::vector<double> br = breakpoints(d);
  auto absd = [&d](double u) { return cplx(std::abs(eval(d, u))); };
  const double l1 = integrate_adaptive(absd, lo, hi, br, cfg).value.real();
  double sup = 0.0;
  constexpr int kGrid = 512;
  for (int i = 0; i <= kGrid; ++i) sup = std::max(sup, std::abs(eval(d, lo + (hi - lo) * i / kGrid)));
  for (double x : br)
    if (x >= lo && x <= hi) sup = std::max(sup, std::abs(eval(d, x)));
  return l1 + sup;
}

/// Sum over modes of coefficient distances; zero exactly when all coefficients agree.
inline double distance(const CylinderElement& f, const CylinderElement& g,
                       const QuadratureConfig& cfg = {}) {
  require_same_hbar(f.hbar(), g.hbar());
  std::set<int> modes;
  for (const auto& [n, a] : f.coeffs()) modes.insert(n);
  for (const auto& [n, a] : g.coeffs()) modes.insert(n);
  double total = 0.0;
  for (int n : modes) total += coefficient_distance(f.coeff(n), g.coeff(n), cfg);
  return total;
}

inline CylinderElement operator+(const CylinderElement& f, const CylinderElement& g) { return add(f, g); }
inline CylinderElement operator-(const CylinderElement& f, const CylinderElement& g) { return subtract(f, g); }
inline CylinderElement operator*(const CylinderElement& f, const CylinderElement& g) { return multiply(f, g); }
inline CylinderElement operator*(cplx c, const CylinderElement& f) { return scale(f, c); }

}  // namespace nccyl
