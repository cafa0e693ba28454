#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "nccyl/error.hpp"
#include "nccyl/field_expr.hpp"

namespace nccyl {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_depth = 40;
  double truncation_threshold = 1e-14;

  void validate() const {
    if (!(abs_tol > 0) || !(rel_tol > 0) || !(truncation_threshold > 0))
      throw InvalidArgument("quadrature tolerances must be strictly positive");
    if (max_depth < 1) throw InvalidArgument("quadrature max_depth must be at least 1");
  }
};

struct QuadratureResult {
  cplx value{};
  double error = 0.0;
  bool converged = true;
  std::size_t intervals = 0;
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  cplx value;
  double error;
  int depth;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(const F& f, double a, double b, int depth) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const cplx fc = f(c);
  cplx k = fc * kWgk[7];
  cplx g = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const cplx s = f(c - dx) + f(c + dx);
    k += kWgk[j] * s;
    if (j % 2 == 1) g += kWg[j / 2] * s;
  }
  return {a, b, k * h, std::abs((k - g) * h), depth};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod on [a, b], first split at the given breakpoints.
/// f is never evaluated at a or b or at any breakpoint.
template <class F>
QuadratureResult integrate_adaptive(const F& f, double a, double b,
                                    const std::vector<double>& breaks,
                                    const QuadratureConfig& cfg) {
  cfg.validate();
  QuadratureResult res;
  if (!(a < b)) return res;
  std::vector<double> cuts = {a};
  for (double x : breaks)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<detail::Panel> open;
  cplx frozen_value = 0.0;
  double frozen_error = 0.0;
  cplx total = 0.0;
  double err = 0.0;
  // A lone panel can straddle a narrow peak and agree with itself; start from a uniform grid.
  constexpr int kInitialPanels = 32;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double len = cuts[i + 1] - cuts[i];
    const int pieces = std::max(1, static_cast<int>(std::ceil(kInitialPanels * len / (b - a))));
    for (int j = 0; j < pieces; ++j) {
      const double lo = cuts[i] + len * j / pieces;
      const double hi = j + 1 == pieces ? cuts[i + 1] : cuts[i] + len * (j + 1) / pieces;
      auto p = detail::gk15(f, lo, hi, 0);
      total += p.value;
      err += p.error;
      open.push(p);
    }
  }
  constexpr std::size_t kMaxPanels = 200000;
  std::size_t panels = open.size();
  while (!open.empty()) {
    const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total));
    if (err <= tol) break;
    auto p = open.top();
    open.pop();
    const double mid = 0.5 * (p.a + p.b);
    if (p.depth >= cfg.max_depth || panels >= kMaxPanels || !(mid > p.a && mid < p.b)) {
      frozen_value += p.value;
      frozen_error += p.error;
      continue;
    }
    auto l = detail::gk15(f, p.a, mid, p.depth + 1);
    auto r = detail::gk15(f, mid, p.b, p.depth + 1);
    total += l.value + r.value - p.value;
    err += l.error + r.error - p.error;
    open.push(l);
    open.push(r);
    ++panels;
  }
  // Re-sum to shed the drift of the running totals.
  cplx v = frozen_value;
  double e = frozen_error;
  while (!open.empty()) {
    v += open.top().value;
    e += open.top().error;
    open.pop();
  }
  res.value = v;
  res.error = e;
  res.intervals = panels;
  res.converged = e <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(v));
  return res;
}

/// Finite interval over which f differs from zero by more than the truncation threshold.
/// Throws NotIntegrable for unbounded support.
inline std::pair<double, double> integration_domain(const FieldExpr& f,
                                                    const QuadratureConfig& cfg) {
  const SupportHint s = f.support();
  switch (s.kind) {
    case SupportHint::Kind::Empty:
      return {0.0, 0.0};
    case SupportHint::Kind::Compact:
      return {s.lo, s.hi};
    case SupportHint::Kind::Unbounded:
      throw NotIntegrable("support is not compact and no decay is known");
    case SupportHint::Kind::RapidDecay:
      break;
  }
  const Tail& lt = f.node().left;
  const Tail& rt = f.node().right;
  const double width = std::max(1.0, 0.25 * (s.hi - s.lo));
  auto march = [&](double start, double dir) {
    double x = start;
    double w = width;
    int quiet = 0;
    for (int step = 0; step < 400; ++step) {
      double m = 0.0;
      for (int i = 0; i <= 64; ++i) m = std::max(m, std::abs(eval(f, x + dir * w * i / 64.0)));
      x += dir * w;
      if (m < cfg.truncation_threshold) {
        if (++quiet == 2) return x;
      } else {
        quiet = 0;
      }
      w *= 1.25;
    }
    throw NotIntegrable("declared rapid decay not observed within the marching budget");
  };
  const double lo = lt.kind == Tail::Kind::Vanish ? lt.edge : march(s.lo, -1.0);
  const double hi = rt.kind == Tail::Kind::Vanish ? rt.edge : march(s.hi, 1.0);
  return {lo, hi};
}

/// Integral of f over the real line.
inline cplx integrate(const FieldExpr& f, const QuadratureConfig& cfg = {}) {
  cfg.validate();
  if (f.is_zero()) return 0.0;
  const auto [a, b] = integration_domain(f, cfg);
  if (!(a < b)) return 0.0;
  auto fn = [&f](double u) { return eval(f, u); };
  const auto r = integrate_adaptive(fn, a, b, breakpoints(f), cfg);
  if (!r.converged) {
    throw ToleranceNotMet("quadrature error estimate " + std::to_string(r.error) +
                          " above tolerance after " + std::to_string(r.intervals) + " panels");
  }
  return r.value;
}

/// Integral of f over [a, b].
inline cplx integrate(const FieldExpr& f, double a, double b, const QuadratureConfig& cfg = {}) {
  auto fn = [&f](double u) { return eval(f, u); };
  const auto r = integrate_adaptive(fn, a, b, breakpoints(f), cfg);
  if (!r.converged) {
    throw ToleranceNotMet("quadrature error estimate " + std::to_string(r.error) +
                          " above tolerance on [" + std::to_string(a) + ", " +
                          std::to_string(b) + "]");
  }
  return r.value;
}

}  // namespace nccyl
