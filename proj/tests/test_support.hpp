#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include "nccyl/nccyl.hpp"

namespace testsupport {

using nccyl::cplx;
using nccyl::FieldExpr;

// Fourth-order central difference; independent of the symbolic derivative.
inline cplx central_diff(const std::function<cplx(double)>& f, double u, double h) {
  return (f(u + h) - f(u - h)) / (2.0 * h);
}

inline cplx richardson_diff(const std::function<cplx(double)>& f, double u, double h = 1e-3) {
  return (4.0 * central_diff(f, u, h / 2) - central_diff(f, u, h)) / 3.0;
}

// Composite Simpson on [a, b]; an oracle separate from the adaptive scheme.
inline cplx simpson(const std::function<cplx(double)>& f, double a, double b, int panels = 20000) {
  const double h = (b - a) / panels;
  cplx s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// Random smooth expression trees, bounded on [-3, 3], no piecewise nodes.
class TreeGen {
 public:
  explicit TreeGen(std::uint64_t seed) : rng_(seed) {}

  FieldExpr tree(int depth) {
    if (depth <= 0 || pick(0, 5) == 0) return leaf();
    switch (pick(0, 11)) {
      case 0: return nccyl::affine(tree(depth - 1), nonzero(-1.5, 1.5), real(-1.0, 1.0));
      case 1: return tree(depth - 1) + tree(depth - 1);
      case 2: return tree(depth - 1) * tree(depth - 1);
      case 3: return nccyl::scale(tree(depth - 1), cplx(real(-1, 1), real(-1, 1)));
      case 4: return nccyl::conjugate(tree(depth - 1));
      case 5: return nccyl::exponential(nccyl::scale(nccyl::hyperbolic_tangent(tree(depth - 1)), real(-1, 1)));
      case 6: return nccyl::power(nccyl::hyperbolic_tangent(tree(depth - 1)), pick(1, 3));
      case 7: {
        const FieldExpr c = tree(depth - 1);
        return nccyl::sqrt_nonneg(nccyl::constant(0.5) + c * nccyl::conjugate(c));
      }
      case 8: return nccyl::smooth_step(nccyl::affine(nccyl::variable(), real(0.1, 0.3), 0.5) + nccyl::scale(nccyl::hyperbolic_tangent(tree(depth - 1)), 0.1));
      case 9: return nccyl::log_cosh(tree(depth - 1));
      case 10: return nccyl::hyperbolic_tangent(tree(depth - 1));
      default: return nccyl::shift(tree(depth - 1), real(-1, 1));
    }
  }

  FieldExpr leaf() {
    switch (pick(0, 3)) {
      case 0: return nccyl::constant(cplx(real(-2, 2), real(-2, 2)));
      case 1: return nccyl::variable();
      case 2: return nccyl::gaussian(real(0.5, 2), real(-2, 2), cplx(real(-1, 1), real(-1, 1)));
      default: return nccyl::affine(nccyl::variable(), real(-1, 1), real(-1, 1));
    }
  }

  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double nonzero(double lo, double hi) {
    double v = 0.0;
    while (std::abs(v) < 0.2) v = real(lo, hi);
    return v;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testsupport
