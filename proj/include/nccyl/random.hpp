#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>

#include "nccyl/bimodule.hpp"
#include "nccyl/cylinder.hpp"
#include "nccyl/field_expr.hpp"

namespace nccyl {

/// Seeded generator for property checks. Same seed, same sequence on a given build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

/// c exp(-a (u - b)^2), a in [0.5, 2], b in [-2, 2], |c| <= 1.
inline FieldExpr random_gaussian(Rng& rng) {
  const double a = rng.uniform(0.5, 2.0);
  const double b = rng.uniform(-2.0, 2.0);
  const double m = rng.uniform(0.1, 1.0);
  const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return gaussian(a, b, std::polar(m, th));
}

/// One to three distinct modes in [-max_mode, max_mode], Gaussian coefficients.
inline CylinderElement random_element(Rng& rng, double hbar, int max_mode = 3) {
  std::map<int, FieldExpr> c;
  const int count = rng.integer(1, 3);
  while (static_cast<int>(c.size()) < count) c.emplace(rng.integer(-max_mode, max_mode), random_gaussian(rng));
  return CylinderElement(hbar, std::move(c));
}

/// One to three distinct slots in [-max_slot, max_slot], Gaussian slot functions.
inline Section random_section(Rng& rng, int max_slot = 2) {
  std::map<int, FieldExpr> s;
  const int count = rng.integer(1, 3);
  while (static_cast<int>(s.size()) < count) s.emplace(rng.integer(-max_slot, max_slot), random_gaussian(rng));
  return Section(std::move(s));
}

}  // namespace nccyl
