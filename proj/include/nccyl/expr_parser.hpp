#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "nccyl/error.hpp"
#include "nccyl/field_expr.hpp"

namespace nccyl {

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : s_(text) {}

  FieldExpr parse() {
    FieldExpr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("end of input or operator");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& expected) const {
    std::string found = pos_ < s_.size() ? "'" + std::string(1, s_[pos_]) + "'" : "end of input";
    throw ParseError(pos_, expected,
                     "parse error at position " + std::to_string(pos_) + ": expected " +
                         expected + ", found " + found);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("'") + c + "'");
  }

  struct DepthGuard {
    explicit DepthGuard(ExprParser& p) : p_(p) {
      if (++p_.depth_ > 256) p_.fail("shallower nesting");
    }
    ~DepthGuard() { --p_.depth_; }
    ExprParser& p_;
  };

  FieldExpr expr() {
    DepthGuard g(*this);
    std::vector<FieldExpr> terms = {term()};
    for (;;) {
      if (accept('+')) terms.push_back(term());
      else if (accept('-')) terms.push_back(scale(term(), -1.0));
      else break;
    }
    return sum(terms);
  }

  FieldExpr term() {
    FieldExpr acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = multiply(acc, unary());
      } else if (accept('/')) {
        skip_ws();
        const std::size_t at = pos_;
        FieldExpr den = unary();
        if (den.kind() == NodeKind::Constant) {
          if (den.node().value == cplx(0.0)) {
            pos_ = at;
            fail("nonzero divisor");
          }
          acc = scale(acc, 1.0 / den.node().value);
        } else {
          acc = ratio_power(acc, den, 1.0);
        }
      } else {
        return acc;
      }
    }
  }

  FieldExpr unary() {
    DepthGuard g(*this);
    if (accept('-')) return scale(unary(), -1.0);
    if (accept('+')) return unary();
    return pow_expr();
  }

  FieldExpr pow_expr() {
    FieldExpr base = primary();
    if (accept('^')) {
      skip_ws();
      const std::size_t at = pos_;
      const double k = number_literal();
      if (k != std::floor(k) || k < 0 || k > 64) {
        pos_ = at;
        fail("non-negative integer exponent");
      }
      return power(base, static_cast<int>(k));
    }
    return base;
  }

  double number_literal() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    if (pos_ == start || (pos_ == start + 1 && s_[start] == '.')) {
      pos_ = start;
      fail("number");
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
      if (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
        pos_ = q;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    return std::strtod(std::string(s_.substr(start, pos_ - start)).c_str(), nullptr);
  }

  std::string identifier() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  // A constant argument such as a slope or an interval endpoint.
  cplx constant_arg() {
    skip_ws();
    const std::size_t at = pos_;
    FieldExpr e = expr();
    if (e.kind() != NodeKind::Constant) {
      pos_ = at;
      fail("constant expression");
    }
    return e.node().value;
  }

  double real_arg() {
    skip_ws();
    const std::size_t at = pos_;
    const cplx c = constant_arg();
    if (c.imag() != 0.0) {
      pos_ = at;
      fail("real constant");
    }
    return c.real();
  }

  FieldExpr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("number, identifier or '('");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return constant(number_literal());
    if (accept('(')) {
      FieldExpr e = expr();
      expect(')');
      return e;
    }
    if (!std::isalpha(static_cast<unsigned char>(c))) fail("number, identifier or '('");
    const std::size_t name_at = pos_;
    const std::string name = identifier();
    if (name == "u" || name == "x") return variable();
    if (name == "i") return constant(cplx(0.0, 1.0));
    if (name == "pi") return constant(std::numbers::pi);
    if (name == "inf") return constant(kInf);
    expect('(');
    FieldExpr out = call(name, name_at);
    expect(')');
    return out;
  }

  FieldExpr call(const std::string& name, std::size_t name_at) {
    if (name == "exp") return exponential(expr());
    if (name == "sqrt") return sqrt_nonneg(expr());
    if (name == "conj") return conjugate(expr());
    if (name == "step01") return smooth_step(expr());
    if (name == "lncosh") return log_cosh(expr());
    if (name == "tanh") return hyperbolic_tangent(expr());
    if (name == "cosh" || name == "sinh") {
      FieldExpr a = expr();
      const double sign = name == "cosh" ? 1.0 : -1.0;
      return scale(add(exponential(a), scale(exponential(scale(a, -1.0)), sign)), 0.5);
    }
    if (name == "ln") {
      skip_ws();
      const std::size_t at = pos_;
      if (identifier() != "cosh") {
        pos_ = at;
        fail("'cosh(' (only ln(cosh(...)) is supported)");
      }
      expect('(');
      FieldExpr a = expr();
      expect(')');
      return log_cosh(a);
    }
    if (name == "at") {
      FieldExpr a = expr();
      expect(',');
      const double slope = real_arg();
      expect(',');
      const double intercept = real_arg();
      return affine(a, slope, intercept);
    }
    if (name == "shift") {
      FieldExpr a = expr();
      expect(',');
      return shift(a, real_arg());
    }
    if (name == "phi") {
      FieldExpr a = expr();
      expect(',');
      skip_ws();
      const std::size_t at = pos_;
      const double k = real_arg();
      if (k != std::floor(k) || k < 0 || k > 32) {
        pos_ = at;
        fail("non-negative integer order");
      }
      return bump_phi(a, static_cast<int>(k));
    }
    if (name == "ratio") {
      FieldExpr num = expr();
      expect(',');
      FieldExpr den = expr();
      expect(',');
      return ratio_power(num, den, real_arg());
    }
    if (name == "cplx") {
      const double re = real_arg();
      expect(',');
      const double im = real_arg();
      return constant(cplx(re, im));
    }
    if (name == "piecewise") {
      std::vector<Branch> bs;
      do {
        const double lo = real_arg();
        expect(',');
        const double hi = real_arg();
        expect(',');
        FieldExpr e = expr();
        bs.push_back({lo, hi, e});
      } while (accept(';'));
      try {
        return piecewise(std::move(bs));
      } catch (const InvalidArgument&) {
        pos_ = name_at;
        fail("non-overlapping piecewise intervals");
      }
    }
    pos_ = name_at;
    fail("known function name (exp, sqrt, conj, step01, lncosh, ln, tanh, cosh, sinh, at, "
         "shift, phi, ratio, cplx, piecewise)");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

inline std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "(-inf)";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (v < 0 || (v == 0 && std::signbit(v))) return "(" + s + ")";
  return s;
}

inline std::string print_node(const Node& n) {
  auto kid = [&](std::size_t i) { return print_node(*n.children[i]); };
  auto join = [&](const char* sep) {
    std::string out = "(";
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      if (i) out += sep;
      out += kid(i);
    }
    return out + ")";
  };
  auto scalar = [](cplx c) {
    if (c.imag() == 0.0) return format_real(c.real());
    return "cplx(" + format_real(c.real()) + ", " + format_real(c.imag()) + ")";
  };
  switch (n.kind) {
    case NodeKind::Constant:
      return scalar(n.value);
    case NodeKind::Identity:
      return "u";
    case NodeKind::Affine:
      return "at(" + kid(0) + ", " + format_real(n.slope) + ", " + format_real(n.intercept) + ")";
    case NodeKind::Sum:
      return join(" + ");
    case NodeKind::Product:
      return join(" * ");
    case NodeKind::Scale:
      return "(" + scalar(n.value) + " * " + kid(0) + ")";
    case NodeKind::Conjugate:
      return "conj(" + kid(0) + ")";
    case NodeKind::Exp:
      return "exp(" + kid(0) + ")";
    case NodeKind::Power:
      return "(" + kid(0) + ")^" + std::to_string(n.order);
    case NodeKind::Sqrt:
      return "sqrt(" + kid(0) + ")";
    case NodeKind::SmoothStep:
      return "step01(" + kid(0) + ")";
    case NodeKind::LnCosh:
      return "lncosh(" + kid(0) + ")";
    case NodeKind::Tanh:
      return "tanh(" + kid(0) + ")";
    case NodeKind::Phi:
      return "phi(" + kid(0) + ", " + std::to_string(n.order) + ")";
    case NodeKind::RatioPow:
      return "ratio(" + kid(0) + ", " + kid(1) + ", " + format_real(n.exponent) + ")";
    case NodeKind::Piecewise: {
      std::string out = "piecewise(";
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) out += "; ";
        out += format_real(n.intervals[i].first) + ", " + format_real(n.intervals[i].second) +
               ", " + kid(i);
      }
      return out + ")";
    }
  }
  return "0";
}

}  // namespace detail

/// Parses the textual grammar documented in docs/expression_grammar.md.
inline FieldExpr parse_expr(std::string_view text) { return detail::ExprParser(text).parse(); }

/// Text that parse_expr maps back to a pointwise-identical expression.
inline std::string to_string(const FieldExpr& f) { return detail::print_node(f.node()); }

inline std::ostream& operator<<(std::ostream& os, const FieldExpr& f) { return os << to_string(f); }

}  // namespace nccyl
