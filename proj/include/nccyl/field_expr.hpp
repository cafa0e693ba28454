#pragma once

// Immutable shared DAG of complex functions of one real variable u. Nodes carry
// tail behaviour (drives quadrature support) and polynomial coefficients where known.
// Equality is never structural; compare by sampling.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <set>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nccyl/error.hpp"

namespace nccyl {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class NodeKind {
  Constant,
  Identity,
  Affine,  // child(slope * u + intercept)
  Sum,
  Product,
  Scale,
  Conjugate,
  Exp,
  Power,
  Sqrt,        // sqrt of a non-negative real child
  SmoothStep,  // C-infinity transition from 0 (s <= 0) to 1 (s >= 1)
  LnCosh,
  Tanh,
  Piecewise,  // branches on left-closed intervals [lo, hi), zero elsewhere
  Phi,        // order-th derivative of exp(-1/s) for s > 0, zero otherwise
  RatioPow,   // num * den^(-p); zero where both vanish
};

/// Asymptotic behaviour of an expression at one end of the real line.
struct Tail {
  enum class Kind { Vanish, Rapid, Bounded, Moderate, Wild };
  Kind kind = Kind::Bounded;
  // Vanish: identically zero beyond edge. Rapid: decay starts around edge.
  double edge = 0.0;
};

struct SupportHint {
  enum class Kind { Empty, Compact, RapidDecay, Unbounded };
  Kind kind = Kind::Unbounded;
  // Compact: [lo, hi]. RapidDecay: the core interval outside of which the
  // function decays faster than any polynomial.
  double lo = -kInf;
  double hi = kInf;

  bool integrable() const { return kind != Kind::Unbounded; }
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::Constant;
  cplx value{};  // Constant value or Scale factor
  double slope = 1.0;
  double intercept = 0.0;
  double exponent = 0.0;  // RatioPow
  int order = 0;          // Power exponent or Phi derivative order
  std::vector<NodePtr> children;
  std::vector<std::pair<double, double>> intervals;  // Piecewise, one per child
  std::vector<double> phi_coeffs;  // Phi: polynomial in 1/s multiplying exp(-1/s)

  Tail left;
  Tail right;
  bool real = false;
  bool is_poly = false;
  std::vector<cplx> poly;  // valid when is_poly; poly[j] multiplies u^j
};

class FieldExpr;

cplx eval(const FieldExpr& f, double u);

/// Handle to an immutable expression. Cheap to copy; safe to share across threads.
class FieldExpr {
 public:
  FieldExpr();
  explicit FieldExpr(NodePtr node) : node_(std::move(node)) {}

  const Node& node() const { return *node_; }
  const NodePtr& ptr() const { return node_; }
  NodeKind kind() const { return node_->kind; }

  cplx operator()(double u) const { return eval(*this, u); }

  /// True when the expression is identically zero by construction.
  bool is_zero() const;
  bool is_real() const { return node_->real; }
  SupportHint support() const;

 private:
  NodePtr node_;
};

struct Branch {
  double lo;
  double hi;
  FieldExpr expr;
};

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr std::size_t kMaxPolyDegree = 16;

inline bool is_empty(const Node& n) {
  return n.left.kind == Tail::Kind::Vanish && n.right.kind == Tail::Kind::Vanish &&
         n.left.edge >= n.right.edge;
}

inline NodePtr zero_node() {
  static const NodePtr zero = [] {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Constant;
    n->value = 0.0;
    n->left = {Tail::Kind::Vanish, kInf};
    n->right = {Tail::Kind::Vanish, -kInf};
    n->real = true;
    n->is_poly = true;
    n->poly = {};
    return n;
  }();
  return zero;
}

inline NodePtr constant_node(cplx c) {
  if (c == cplx(0.0)) return zero_node();
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Constant;
  n->value = c;
  n->left = {Tail::Kind::Bounded, 0.0};
  n->right = {Tail::Kind::Bounded, 0.0};
  n->real = c.imag() == 0.0;
  n->is_poly = true;
  n->poly = {c};
  return n;
}

inline void trim_poly(std::vector<cplx>& p) {
  while (!p.empty() && p.back() == cplx(0.0)) p.pop_back();
}

inline std::vector<cplx> poly_add(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  std::vector<cplx> r(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  trim_poly(r);
  return r;
}

inline std::vector<cplx> poly_mul(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<cplx> r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  trim_poly(r);
  return r;
}

// p(s*u + b) as a polynomial in u.
inline std::vector<cplx> poly_compose_affine(const std::vector<cplx>& p, double s, double b) {
  std::vector<cplx> r;
  const std::vector<cplx> lin = {cplx(b), cplx(s)};
  for (std::size_t i = p.size(); i-- > 0;) {
    r = poly_add(poly_mul(r, lin), {p[i]});
  }
  return r;
}

inline int worst_rank(Tail::Kind k) { return static_cast<int>(k); }

inline Tail tail_sum(const std::vector<Tail>& tails, bool left) {
  bool all_vanish = true;
  Tail::Kind worst = Tail::Kind::Vanish;
  for (const auto& t : tails) {
    if (t.kind != Tail::Kind::Vanish) {
      all_vanish = false;
      if (worst_rank(t.kind) > worst_rank(worst)) worst = t.kind;
    }
  }
  if (all_vanish || worst == Tail::Kind::Rapid) {
    double edge = left ? kInf : -kInf;
    for (const auto& t : tails) {
      if (!std::isfinite(t.edge)) continue;
      edge = left ? std::min(edge, t.edge) : std::max(edge, t.edge);
    }
    return {all_vanish ? Tail::Kind::Vanish : Tail::Kind::Rapid, edge};
  }
  return {worst, 0.0};
}

inline Tail tail_product(const std::vector<Tail>& tails, bool left) {
  bool any_vanish = false;
  double vanish_edge = left ? -kInf : kInf;
  bool any_wild = false, any_rapid = false, any_moderate = false;
  double rapid_edge = left ? kInf : -kInf;
  for (const auto& t : tails) {
    switch (t.kind) {
      case Tail::Kind::Vanish:
        any_vanish = true;
        vanish_edge = left ? std::max(vanish_edge, t.edge) : std::min(vanish_edge, t.edge);
        break;
      case Tail::Kind::Rapid:
        any_rapid = true;
        rapid_edge = left ? std::min(rapid_edge, t.edge) : std::max(rapid_edge, t.edge);
        break;
      case Tail::Kind::Wild:
        any_wild = true;
        break;
      case Tail::Kind::Moderate:
        any_moderate = true;
        break;
      case Tail::Kind::Bounded:
        break;
    }
  }
  if (any_vanish) return {Tail::Kind::Vanish, vanish_edge};
  if (any_wild) return {Tail::Kind::Wild, 0.0};
  if (any_rapid) return {Tail::Kind::Rapid, rapid_edge};
  if (any_moderate) return {Tail::Kind::Moderate, 0.0};
  return {Tail::Kind::Bounded, 0.0};
}

inline Tail map_tail(Tail t, double slope, double intercept) {
  if (std::isfinite(t.edge)) t.edge = (t.edge - intercept) / slope;
  else if (slope < 0) t.edge = -t.edge;
  return t;
}

// Keeps the kind, used by functions g with g(0) = 0 applied to a child.
inline Tail zero_preserving(const Tail& t, Tail::Kind otherwise) {
  if (t.kind == Tail::Kind::Vanish || t.kind == Tail::Kind::Rapid) return t;
  return {otherwise, 0.0};
}

// Real linear polynomial c0 + c1*u with c1 != 0.
inline bool real_linear(const Node& n, double& c0, double& c1) {
  if (!n.is_poly || n.poly.size() != 2) return false;
  if (n.poly[0].imag() != 0.0 || n.poly[1].imag() != 0.0) return false;
  c0 = n.poly[0].real();
  c1 = n.poly[1].real();
  return c1 != 0.0;
}

// Tails of a function that is zero where its argument is <= 0.
inline void step_like_tails(Node& n, const Node& arg) {
  double c0 = 0, c1 = 0;
  if (real_linear(arg, c0, c1)) {
    const double root = -c0 / c1;
    if (c1 > 0) {
      n.left = {Tail::Kind::Vanish, root};
      n.right = {Tail::Kind::Bounded, 0.0};
    } else {
      n.left = {Tail::Kind::Bounded, 0.0};
      n.right = {Tail::Kind::Vanish, root};
    }
    return;
  }
  n.left = zero_preserving(arg.left, Tail::Kind::Bounded);
  n.right = zero_preserving(arg.right, Tail::Kind::Bounded);
}

inline void exp_tails(Node& n, const Node& arg) {
  if (arg.is_poly) {
    const auto& p = arg.poly;
    int lead = -1;
    for (int j = static_cast<int>(p.size()) - 1; j >= 1; --j) {
      if (p[j].real() != 0.0) {
        lead = j;
        break;
      }
    }
    if (lead < 0) {
      n.left = n.right = {Tail::Kind::Bounded, 0.0};
      return;
    }
    const double lc = p[lead].real();
    const double left_sign = (lead % 2 == 0) ? lc : -lc;
    // Locate the bulk of exp(Re p) for rapid tails.
    double center = 0.0;
    double width = 1.0;
    if (lead == 2 && lc < 0) {
      center = -p[1].real() / (2.0 * lc);
      width = 1.0 / std::sqrt(-lc);
    } else if (lc < 0 && left_sign < 0) {
      double best = -kInf;
      for (int i = 0; i <= 4000; ++i) {
        const double u = -200.0 + 0.1 * i;
        double v = 0.0;
        for (std::size_t j = p.size(); j-- > 0;) v = v * u + p[j].real();
        if (v > best) {
          best = v;
          center = u;
        }
      }
    }
    n.left = left_sign < 0 ? Tail{Tail::Kind::Rapid, center - width} : Tail{Tail::Kind::Wild, 0.0};
    n.right = lc < 0 ? Tail{Tail::Kind::Rapid, center + width} : Tail{Tail::Kind::Wild, 0.0};
    return;
  }
  auto one_side = [](const Tail& t) {
    return worst_rank(t.kind) <= worst_rank(Tail::Kind::Bounded) ? Tail{Tail::Kind::Bounded, 0.0}
                                                                 : Tail{Tail::Kind::Wild, 0.0};
  };
  n.left = one_side(arg.left);
  n.right = one_side(arg.right);
}

inline std::vector<double> phi_coefficients(int order) {
  // d/ds [P(1/s) e^{-1/s}] = x^2 (P(x) - P'(x)) e^{-x} with x = 1/s.
  std::vector<double> p = {1.0};
  for (int k = 0; k < order; ++k) {
    std::vector<double> q(p.size() + 2, 0.0);
    for (std::size_t j = 0; j < p.size(); ++j) {
      q[j + 2] += p[j];
      if (j >= 1) q[j + 1] -= static_cast<double>(j) * p[j];
    }
    p = std::move(q);
  }
  return p;
}

cplx eval_node(const Node& n, double u);

inline bool all_constant(const std::vector<NodePtr>& cs) {
  return std::all_of(cs.begin(), cs.end(),
                     [](const NodePtr& c) { return c->kind == NodeKind::Constant; });
}

// Evaluates a node whose children are all constants.
inline NodePtr fold_if_constant(std::shared_ptr<Node> n) {
  if (n->kind != NodeKind::Identity && !n->children.empty() && all_constant(n->children) &&
      n->kind != NodeKind::Piecewise) {
    try {
      return constant_node(eval_node(*n, 0.0));
    } catch (const Error&) {
      return n;
    }
  }
  if (is_empty(*n)) return zero_node();
  return n;
}

}  // namespace detail

inline FieldExpr::FieldExpr() : node_(detail::zero_node()) {}

inline bool FieldExpr::is_zero() const { return detail::is_empty(*node_); }

inline SupportHint FieldExpr::support() const {
  const Tail& l = node_->left;
  const Tail& r = node_->right;
  using K = Tail::Kind;
  if (detail::is_empty(*node_)) return {SupportHint::Kind::Empty, 0.0, 0.0};
  if (l.kind == K::Vanish && r.kind == K::Vanish)
    return {SupportHint::Kind::Compact, l.edge, r.edge};
  const bool l_ok = l.kind == K::Vanish || l.kind == K::Rapid;
  const bool r_ok = r.kind == K::Vanish || r.kind == K::Rapid;
  if (l_ok && r_ok) {
    double lo = l.edge, hi = r.edge;
    if (lo > hi) std::swap(lo, hi);
    return {SupportHint::Kind::RapidDecay, lo, hi};
  }
  return {SupportHint::Kind::Unbounded, -kInf, kInf};
}

inline FieldExpr constant(cplx c) { return FieldExpr(detail::constant_node(c)); }

inline FieldExpr zero() { return FieldExpr(); }

/// The variable u.
inline FieldExpr variable() {
  static const NodePtr id = [] {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Identity;
    n->left = {Tail::Kind::Moderate, 0.0};
    n->right = {Tail::Kind::Moderate, 0.0};
    n->real = true;
    n->is_poly = true;
    n->poly = {0.0, 1.0};
    return n;
  }();
  return FieldExpr(id);
}

FieldExpr scale(const FieldExpr& f, cplx c);

/// u -> f(slope * u + intercept).
inline FieldExpr affine(const FieldExpr& f, double slope, double intercept) {
  const Node& c = f.node();
  if (c.kind == NodeKind::Constant) return f;
  if (slope == 0.0) return constant(eval(f, intercept));
  if (slope == 1.0 && intercept == 0.0) return f;
  if (c.kind == NodeKind::Affine) {
    // c.child(c.slope * (slope*u + intercept) + c.intercept)
    return affine(FieldExpr(c.children[0]), c.slope * slope, c.slope * intercept + c.intercept);
  }
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Affine;
  n->slope = slope;
  n->intercept = intercept;
  n->children = {f.ptr()};
  if (slope > 0) {
    n->left = detail::map_tail(c.left, slope, intercept);
    n->right = detail::map_tail(c.right, slope, intercept);
  } else {
    n->left = detail::map_tail(c.right, slope, intercept);
    n->right = detail::map_tail(c.left, slope, intercept);
  }
  n->real = c.real;
  if (c.is_poly) {
    n->is_poly = true;
    n->poly = detail::poly_compose_affine(c.poly, slope, intercept);
  }
  return FieldExpr(detail::fold_if_constant(n));
}

/// u -> f(u + a). The support hint moves by -a.
inline FieldExpr shift(const FieldExpr& f, double a) { return affine(f, 1.0, a); }

inline FieldExpr sum(const std::vector<FieldExpr>& terms) {
  std::vector<NodePtr> kids;
  cplx c = 0.0;
  std::function<void(const NodePtr&)> absorb = [&](const NodePtr& p) {
    if (detail::is_empty(*p)) return;
    if (p->kind == NodeKind::Constant) {
      c += p->value;
    } else if (p->kind == NodeKind::Sum) {
      for (const auto& k : p->children) absorb(k);
    } else {
      kids.push_back(p);
    }
  };
  for (const auto& t : terms) absorb(t.ptr());
  if (c != cplx(0.0)) kids.push_back(detail::constant_node(c));
  if (kids.empty()) return zero();
  if (kids.size() == 1) return FieldExpr(kids.front());

  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Sum;
  std::vector<Tail> lt, rt;
  bool real = true, poly = true;
  std::vector<cplx> p;
  for (const auto& k : kids) {
    lt.push_back(k->left);
    rt.push_back(k->right);
    real = real && k->real;
    if (poly && k->is_poly) p = detail::poly_add(p, k->poly);
    else poly = false;
  }
  n->children = std::move(kids);
  n->left = detail::tail_sum(lt, true);
  n->right = detail::tail_sum(rt, false);
  n->real = real;
  n->is_poly = poly;
  if (poly) n->poly = std::move(p);
  return FieldExpr(detail::fold_if_constant(n));
}

inline FieldExpr add(const FieldExpr& f, const FieldExpr& g) { return sum({f, g}); }

inline FieldExpr product(const std::vector<FieldExpr>& factors) {
  std::vector<NodePtr> kids;
  cplx c = 1.0;
  std::function<void(const NodePtr&)> absorb = [&](const NodePtr& p) {
    if (p->kind == NodeKind::Constant) {
      c *= p->value;
    } else if (p->kind == NodeKind::Scale) {
      c *= p->value;
      absorb(p->children[0]);
    } else if (p->kind == NodeKind::Product) {
      for (const auto& k : p->children) absorb(k);
    } else {
      kids.push_back(p);
    }
  };
  for (const auto& f : factors) {
    if (f.is_zero()) return zero();
    absorb(f.ptr());
  }
  if (c == cplx(0.0)) return zero();
  if (kids.empty()) return constant(c);
  if (kids.size() == 1) return scale(FieldExpr(kids.front()), c);

  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Product;
  std::vector<Tail> lt, rt;
  bool real = true, poly = true;
  std::vector<cplx> p = {1.0};
  for (const auto& k : kids) {
    lt.push_back(k->left);
    rt.push_back(k->right);
    real = real && k->real;
    if (poly && k->is_poly && p.size() + k->poly.size() <= detail::kMaxPolyDegree + 2)
      p = detail::poly_mul(p, k->poly);
    else
      poly = false;
  }
  n->children = std::move(kids);
  n->left = detail::tail_product(lt, true);
  n->right = detail::tail_product(rt, false);
  n->real = real;
  n->is_poly = poly;
  if (poly) n->poly = std::move(p);
  if (detail::is_empty(*n)) return zero();
  return scale(FieldExpr(n), c);
}

inline FieldExpr multiply(const FieldExpr& f, const FieldExpr& g) { return product({f, g}); }

inline FieldExpr scale(const FieldExpr& f, cplx c) {
  if (c == cplx(0.0) || f.is_zero()) return zero();
  if (c == cplx(1.0)) return f;
  const Node& k = f.node();
  if (k.kind == NodeKind::Constant) {
    // Real times real stays real even for infinities.
    if (c.imag() == 0.0 && k.value.imag() == 0.0) return constant(c.real() * k.value.real());
    return constant(c * k.value);
  }
  if (k.kind == NodeKind::Scale) return scale(FieldExpr(k.children[0]), c * k.value);
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Scale;
  n->value = c;
  n->children = {f.ptr()};
  n->left = k.left;
  n->right = k.right;
  n->real = k.real && c.imag() == 0.0;
  if (k.is_poly) {
    n->is_poly = true;
    for (const auto& a : k.poly) n->poly.push_back(c * a);
  }
  return FieldExpr(n);
}

inline FieldExpr conjugate(const FieldExpr& f) {
  const Node& k = f.node();
  if (k.real) return f;
  if (k.kind == NodeKind::Constant) return constant(std::conj(k.value));
  if (k.kind == NodeKind::Conjugate) return FieldExpr(k.children[0]);
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Conjugate;
  n->children = {f.ptr()};
  n->left = k.left;
  n->right = k.right;
  n->real = false;
  if (k.is_poly) {
    n->is_poly = true;
    for (const auto& a : k.poly) n->poly.push_back(std::conj(a));
  }
  return FieldExpr(n);
}

namespace detail {

inline std::shared_ptr<Node> unary(NodeKind kind, const FieldExpr& arg) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->children = {arg.ptr()};
  return n;
}

}  // namespace detail

inline FieldExpr exponential(const FieldExpr& f) {
  auto n = detail::unary(NodeKind::Exp, f);
  detail::exp_tails(*n, f.node());
  n->real = f.is_real();
  return FieldExpr(detail::fold_if_constant(n));
}

inline FieldExpr power(const FieldExpr& f, int k) {
  if (k < 0) throw InvalidArgument("power: exponent must be non-negative");
  if (k == 0) return constant(1.0);
  if (k == 1) return f;
  if (f.is_zero()) return zero();
  auto n = detail::unary(NodeKind::Power, f);
  n->order = k;
  n->left = f.node().left;
  n->right = f.node().right;
  n->real = f.is_real();
  if (f.node().is_poly && f.node().poly.size() * static_cast<std::size_t>(k) <=
                              detail::kMaxPolyDegree * 2) {
    std::vector<cplx> p = {1.0};
    for (int i = 0; i < k; ++i) p = detail::poly_mul(p, f.node().poly);
    if (p.size() <= detail::kMaxPolyDegree + 1) {
      n->is_poly = true;
      n->poly = std::move(p);
    }
  }
  return FieldExpr(detail::fold_if_constant(n));
}

/// Square root of a child that is real and non-negative by contract.
inline FieldExpr sqrt_nonneg(const FieldExpr& f) {
  if (f.is_zero()) return zero();
  auto n = detail::unary(NodeKind::Sqrt, f);
  n->left = f.node().left;
  n->right = f.node().right;
  n->real = true;
  return FieldExpr(detail::fold_if_constant(n));
}

/// The C-infinity transition s -> phi(s) / (phi(s) + phi(1 - s)), phi(s) = exp(-1/s).
inline FieldExpr smooth_step(const FieldExpr& arg) {
  auto n = detail::unary(NodeKind::SmoothStep, arg);
  detail::step_like_tails(*n, arg.node());
  n->real = true;
  return FieldExpr(detail::fold_if_constant(n));
}

inline FieldExpr smooth_step() { return smooth_step(variable()); }

/// order-th derivative of s -> exp(-1/s) (zero for s <= 0), applied to arg.
inline FieldExpr bump_phi(const FieldExpr& arg, int order) {
  if (order < 0) throw InvalidArgument("bump_phi: order must be non-negative");
  auto n = detail::unary(NodeKind::Phi, arg);
  n->order = order;
  n->phi_coeffs = detail::phi_coefficients(order);
  detail::step_like_tails(*n, arg.node());
  n->real = true;
  return FieldExpr(detail::fold_if_constant(n));
}

inline FieldExpr log_cosh(const FieldExpr& arg) {
  if (arg.is_zero()) return zero();
  auto n = detail::unary(NodeKind::LnCosh, arg);
  n->left = arg.node().left;
  n->right = arg.node().right;
  n->real = true;
  return FieldExpr(detail::fold_if_constant(n));
}

inline FieldExpr hyperbolic_tangent(const FieldExpr& arg) {
  if (arg.is_zero()) return zero();
  auto n = detail::unary(NodeKind::Tanh, arg);
  n->left = detail::zero_preserving(arg.node().left, Tail::Kind::Bounded);
  n->right = detail::zero_preserving(arg.node().right, Tail::Kind::Bounded);
  n->real = true;
  return FieldExpr(detail::fold_if_constant(n));
}

/// num * den^(-p). Where den vanishes the value is 0 if num vanishes there too,
/// otherwise evaluation throws NonSmoothPoint.
inline FieldExpr ratio_power(const FieldExpr& num, const FieldExpr& den, double p) {
  if (num.is_zero()) return zero();
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::RatioPow;
  n->exponent = p;
  n->children = {num.ptr(), den.ptr()};
  const Node& nn = num.node();
  n->left = nn.left.kind == Tail::Kind::Vanish ? nn.left : Tail{Tail::Kind::Wild, 0.0};
  n->right = nn.right.kind == Tail::Kind::Vanish ? nn.right : Tail{Tail::Kind::Wild, 0.0};
  n->real = nn.real && den.is_real();
  return FieldExpr(detail::fold_if_constant(n));
}

/// Branches on left-closed intervals [lo, hi); the function is zero outside all of them.
inline FieldExpr piecewise(std::vector<Branch> branches) {
  std::erase_if(branches, [](const Branch& b) { return b.expr.is_zero() || !(b.lo < b.hi); });
  std::sort(branches.begin(), branches.end(),
            [](const Branch& a, const Branch& b) { return a.lo < b.lo; });
  for (std::size_t i = 1; i < branches.size(); ++i) {
    if (branches[i].lo < branches[i - 1].hi)
      throw InvalidArgument("piecewise: branch intervals overlap");
  }
  if (branches.empty()) return zero();
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Piecewise;
  bool real = true;
  for (const auto& b : branches) {
    n->children.push_back(b.expr.ptr());
    n->intervals.emplace_back(b.lo, b.hi);
    real = real && b.expr.is_real();
  }
  const auto& first = branches.front();
  const auto& last = branches.back();
  n->left = std::isfinite(first.lo) ? Tail{Tail::Kind::Vanish, first.lo} : first.expr.node().left;
  n->right = std::isfinite(last.hi) ? Tail{Tail::Kind::Vanish, last.hi} : last.expr.node().right;
  n->real = real;
  return FieldExpr(n);
}

/// c * exp(-a (u - b)^2).
inline FieldExpr gaussian(double a, double b, cplx c = 1.0) {
  return scale(exponential(scale(power(shift(variable(), -b), 2), -a)), c);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace detail {

inline double smooth_step_value(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  // phi(s) / (phi(s) + phi(1-s)) = 1 / (1 + exp(1/s - 1/(1-s)))
  return 1.0 / (1.0 + std::exp(1.0 / s - 1.0 / (1.0 - s)));
}

inline double phi_value(const std::vector<double>& coeffs, double s) {
  if (s <= 0.0) return 0.0;
  const double x = 1.0 / s;
  if (x > 708.0) return 0.0;
  double p = 0.0;
  for (std::size_t j = coeffs.size(); j-- > 0;) p = p * x + coeffs[j];
  return p * std::exp(-x);
}

inline double log_cosh_value(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

inline cplx eval_node(const Node& n, double u) {
  switch (n.kind) {
    case NodeKind::Constant:
      return n.value;
    case NodeKind::Identity:
      return u;
    case NodeKind::Affine:
      return eval_node(*n.children[0], n.slope * u + n.intercept);
    case NodeKind::Sum: {
      cplx s = 0.0;
      for (const auto& c : n.children) s += eval_node(*c, u);
      return s;
    }
    case NodeKind::Product: {
      cplx p = 1.0;
      for (const auto& c : n.children) {
        p *= eval_node(*c, u);
        if (p == cplx(0.0)) return 0.0;
      }
      return p;
    }
    case NodeKind::Scale:
      return n.value * eval_node(*n.children[0], u);
    case NodeKind::Conjugate:
      return std::conj(eval_node(*n.children[0], u));
    case NodeKind::Exp:
      return std::exp(eval_node(*n.children[0], u));
    case NodeKind::Power: {
      const cplx b = eval_node(*n.children[0], u);
      cplx r = 1.0;
      for (int i = 0; i < n.order; ++i) r *= b;
      return r;
    }
    case NodeKind::Sqrt:
      return std::sqrt(std::max(0.0, eval_node(*n.children[0], u).real()));
    case NodeKind::SmoothStep:
      return smooth_step_value(eval_node(*n.children[0], u).real());
    case NodeKind::LnCosh:
      return log_cosh_value(eval_node(*n.children[0], u).real());
    case NodeKind::Tanh:
      return std::tanh(eval_node(*n.children[0], u).real());
    case NodeKind::Piecewise: {
      for (std::size_t i = 0; i < n.intervals.size(); ++i) {
        if (u >= n.intervals[i].first && u < n.intervals[i].second)
          return eval_node(*n.children[i], u);
      }
      return 0.0;
    }
    case NodeKind::Phi:
      return phi_value(n.phi_coeffs, eval_node(*n.children[0], u).real());
    case NodeKind::RatioPow: {
      const cplx num = eval_node(*n.children[0], u);
      if (num == cplx(0.0)) return 0.0;
      const double den = eval_node(*n.children[1], u).real();
      if (den <= 0.0) {
        throw NonSmoothPoint("derivative undefined at u = " + std::to_string(u) +
                             ": denominator vanishes to first order only");
      }
      return num * std::pow(den, -n.exponent);
    }
  }
  return 0.0;
}

}  // namespace detail

/// Value at u. Total on the reals except where a RatioPow node signals NonSmoothPoint.
inline cplx eval(const FieldExpr& f, double u) { return detail::eval_node(f.node(), u); }

// ---------------------------------------------------------------------------
// Differentiation
// ---------------------------------------------------------------------------

namespace detail {

class Differentiator {
 public:
  FieldExpr operator()(const FieldExpr& f) {
    const Node* key = f.ptr().get();
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    FieldExpr d = derive(f);
    memo_.emplace(key, d);
    keep_.push_back(f.ptr());
    return d;
  }

 private:
  // Real-argument nodes see Re(child), so the chain factor is Re(child').
  FieldExpr real_d(const FieldExpr& c) {
    const FieldExpr d = (*this)(c);
    if (d.is_real()) return d;
    return scale(add(d, conjugate(d)), 0.5);
  }

  FieldExpr derive(const FieldExpr& f) {
    const Node& n = f.node();
    auto child = [&](std::size_t i) { return FieldExpr(n.children[i]); };
    switch (n.kind) {
      case NodeKind::Constant:
        return zero();
      case NodeKind::Identity:
        return constant(1.0);
      case NodeKind::Affine:
        return scale(affine((*this)(child(0)), n.slope, n.intercept), n.slope);
      case NodeKind::Sum: {
        std::vector<FieldExpr> terms;
        for (std::size_t i = 0; i < n.children.size(); ++i) terms.push_back((*this)(child(i)));
        return sum(terms);
      }
      case NodeKind::Product: {
        std::vector<FieldExpr> terms;
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          std::vector<FieldExpr> factors;
          for (std::size_t j = 0; j < n.children.size(); ++j)
            factors.push_back(i == j ? (*this)(child(j)) : child(j));
          terms.push_back(product(factors));
        }
        return sum(terms);
      }
      case NodeKind::Scale:
        return scale((*this)(child(0)), n.value);
      case NodeKind::Conjugate:
        return conjugate((*this)(child(0)));
      case NodeKind::Exp:
        return multiply(f, (*this)(child(0)));
      case NodeKind::Power:
        return scale(multiply(power(child(0), n.order - 1), (*this)(child(0))),
                     static_cast<double>(n.order));
      case NodeKind::Sqrt:
        return scale(ratio_power(real_d(child(0)), child(0), 0.5), 0.5);
      case NodeKind::SmoothStep: {
        const FieldExpr s = child(0);
        const FieldExpr sc = add(constant(1.0), scale(s, -1.0));
        const FieldExpr p0 = bump_phi(s, 0);
        const FieldExpr p0c = bump_phi(sc, 0);
        const FieldExpr p1 = bump_phi(s, 1);
        const FieldExpr p1c = bump_phi(sc, 1);
        const FieldExpr den = add(p0, p0c);
        // f0' = phi'(s)/D - phi(s) (phi'(s) - phi'(1-s)) / D^2
        const FieldExpr df0 =
            add(ratio_power(p1, den, 1.0),
                scale(ratio_power(multiply(p0, add(p1, scale(p1c, -1.0))), den, 2.0), -1.0));
        return multiply(df0, real_d(s));
      }
      case NodeKind::LnCosh:
        return multiply(hyperbolic_tangent(child(0)), real_d(child(0)));
      case NodeKind::Tanh:
        return multiply(add(constant(1.0), scale(power(f, 2), -1.0)), real_d(child(0)));
      case NodeKind::Piecewise: {
        std::vector<Branch> bs;
        for (std::size_t i = 0; i < n.children.size(); ++i)
          bs.push_back({n.intervals[i].first, n.intervals[i].second, (*this)(child(i))});
        return piecewise(std::move(bs));
      }
      case NodeKind::Phi:
        return multiply(bump_phi(child(0), n.order + 1), real_d(child(0)));
      case NodeKind::RatioPow: {
        const FieldExpr num = child(0), den = child(1);
        return add(ratio_power((*this)(num), den, n.exponent),
                   scale(ratio_power(multiply(num, real_d(den)), den, n.exponent + 1.0),
                         -n.exponent));
      }
    }
    return zero();
  }

  std::unordered_map<const Node*, FieldExpr> memo_;
  std::vector<NodePtr> keep_;
};

}  // namespace detail

/// Exact symbolic derivative d/du.
inline FieldExpr derivative(const FieldExpr& f) {
  detail::Differentiator d;
  return d(f);
}

// ---------------------------------------------------------------------------
// Breakpoints
// ---------------------------------------------------------------------------

/// Points where some branch of f (or of one of its subexpressions) switches,
/// mapped into the outer variable. Sorted, deduplicated.
inline std::vector<double> breakpoints(const FieldExpr& f) {
  std::vector<double> out;
  std::set<std::tuple<const Node*, double, double>> seen;
  // Node variable v = s*u + b.
  std::function<void(const Node&, double, double)> walk = [&](const Node& n, double s, double b) {
    if (!seen.emplace(&n, s, b).second) return;
    auto emit = [&](double v) {
      const double u = (v - b) / s;
      if (std::isfinite(u)) out.push_back(u);
    };
    switch (n.kind) {
      case NodeKind::Affine:
        walk(*n.children[0], n.slope * s, n.slope * b + n.intercept);
        return;
      case NodeKind::Piecewise:
        for (const auto& [lo, hi] : n.intervals) {
          emit(lo);
          emit(hi);
        }
        break;
      case NodeKind::SmoothStep:
      case NodeKind::Phi: {
        double c0 = 0, c1 = 0;
        if (detail::real_linear(*n.children[0], c0, c1)) {
          emit(-c0 / c1);
          if (n.kind == NodeKind::SmoothStep) emit((1.0 - c0) / c1);
        }
        break;
      }
      default:
        break;
    }
    for (const auto& c : n.children) walk(*c, s, b);
  };
  walk(f.node(), 1.0, 0.0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

inline FieldExpr operator+(const FieldExpr& f, const FieldExpr& g) { return add(f, g); }
inline FieldExpr operator-(const FieldExpr& f) { return scale(f, -1.0); }
inline FieldExpr operator-(const FieldExpr& f, const FieldExpr& g) { return add(f, scale(g, -1.0)); }
inline FieldExpr operator*(const FieldExpr& f, const FieldExpr& g) { return multiply(f, g); }
inline FieldExpr operator*(cplx c, const FieldExpr& f) { return scale(f, c); }
inline FieldExpr operator*(const FieldExpr& f, cplx c) { return scale(f, c); }
inline FieldExpr operator+(const FieldExpr& f, cplx c) { return add(f, constant(c)); }
inline FieldExpr operator+(cplx c, const FieldExpr& f) { return add(constant(c), f); }

}  // namespace nccyl
