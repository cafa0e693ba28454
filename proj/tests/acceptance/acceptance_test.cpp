// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "nccyl/nccyl.hpp"

using namespace nccyl;

namespace {

const cplx kPiI{0.0, std::numbers::pi};

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Tracks max residual / tolerance ratio plus the offending label.
class Gate {
 public:
  void see(const std::string& what, double residual, double tol) {
    ++count_;
    const double ratio = std::isfinite(residual) ? residual / tol : INFINITY;
    if (ratio > worst_) {
      worst_ = ratio;
      label_ = what + " residual " + fmt(residual) + " tol " + fmt(tol);
    }
    if (!(residual <= tol)) pass_ = false;
  }
  void fail(const std::string& what) {
    pass_ = false;
    label_ = what;
    worst_ = INFINITY;
  }
  Outcome outcome() const {
    return {pass_, std::to_string(count_) + " checks; worst: " + (label_.empty() ? "none" : label_)};
  }

  static std::string fmt(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", v);
    return b;
  }

 private:
  bool pass_ = true;
  int count_ = 0;
  double worst_ = -1.0;
  std::string label_;
};

Outcome guarded(const std::function<Outcome()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

Outcome criterion1() {
  Gate g;
  for (double h : {0.5, 1.0, 2.0})
    for (int n = 1; n <= 4; ++n) {
      const cplx t = trace_pn(build_pn(h, n));
      g.see("trace n=" + std::to_string(n) + " hbar=" + Gate::fmt(h), std::abs(t - n * h) / (n * h), 1e-8);
    }
  return g.outcome();
}

Outcome criterion2() {
  Gate g;
  for (double h : {0.5, 1.0})
    for (int n = 1; n <= 3; ++n) {
      const cplx c = chern_number(build_pn(h, n));
      const std::string tag = " n=" + std::to_string(n) + " hbar=" + Gate::fmt(h);
      g.see("Re chern" + tag, std::abs(c.real() - n), 1e-4);
      g.see("Im chern" + tag, std::abs(c.imag()), 1e-6);
    }
  return g.outcome();
}

Outcome criterion3() {
  Gate g;
  for (double h : {0.5, 1.0, 2.0})
    for (int n = 1; n <= 3; ++n) {
      const auto p = build_pn(h, n);
      g.see("idempotence n=" + std::to_string(n), distance(p.element * p.element, p.element), 1e-8);
    }
  for (double h : {0.5, 1.0})
    for (auto [n, m] : {std::pair{1, 1}, {1, 2}, {2, 2}}) {
      const auto pn = build_pn(h, n), pm = build_pn(h, m);
      const CylinderElement pt = shifted_projection(pm, n);
      const std::string tag = " (" + std::to_string(n) + "," + std::to_string(m) + ")";
      g.see("orthogonality" + tag, distance(pn.element * pt, CylinderElement(h, {})), 1e-10);
      g.see("direct sum" + tag, distance(pn.element + pt, build_pn(h, n + m).element), 1e-10);
    }
  return g.outcome();
}

Outcome criterion4() {
  Gate g;
  constexpr int kInstances = 100;
  constexpr double kTol = 1e-8, kPsiTol = 1e-6;
  const double hbars[] = {0.5, 1.0, 2.0};
  Rng rng(2718);
  for (int t = 0; t < kInstances; ++t) {
    const double h = hbars[t % 3];
    const CylinderElement f = random_element(rng, h), a = random_element(rng, h), b = random_element(rng, h);
    g.see("associativity", distance((f * a) * b, f * (a * b)), kTol);
    g.see("star anti-homomorphism", distance(star(f * a), star(a) * star(f)), kTol);
    g.see("star involution", distance(star(star(f)), f), kTol);
    g.see("Leibniz d1", distance(d1(f * a), d1(f) * a + f * d1(a)), kTol);
    g.see("Leibniz d2", distance(d2(f * a), d2(f) * a + f * d2(a)), kTol);
    g.see("derivations commute", distance(d1(d2(f)), d2(d1(f))), kTol);
    g.see("trace cyclic", std::abs(trace(f * a) - trace(a * f)), kTol);
    g.see("trace of derivatives", std::max(std::abs(trace(d1(f))), std::abs(trace(d2(f)))), kTol);
    const cplx pos = trace(star(f) * f);
    g.see("trace positive", pos.real() > 0 ? std::abs(pos.imag()) : INFINITY, kTol);
    g.see("trace hermitian", std::abs(trace(star(f)) - std::conj(trace(f))), kTol);
  }
  for (int t = 0; t < kInstances; ++t) {
    const double h = hbars[t % 3];
    const CylinderElement f0 = random_element(rng, h, 2), f1 = random_element(rng, h, 2),
                          f2 = random_element(rng, h, 2), f3 = random_element(rng, h, 2);
    g.see("cocycle cyclic", std::abs(cocycle_psi(f2, f0, f1) - cocycle_psi(f0, f1, f2)), kPsiTol);
    g.see("cocycle Hochschild",
          std::abs(cocycle_psi(f0 * f1, f2, f3) - cocycle_psi(f0, f1 * f2, f3) + cocycle_psi(f0, f1, f2 * f3) -
                   cocycle_psi(f3 * f0, f1, f2)),
          kPsiTol);
  }
  return g.outcome();
}

Outcome criterion5() {
  Gate g;
  constexpr int kInstances = 50;
  constexpr double kTol = 1e-8;
  const auto cases = default_module_cases();
  Rng rng(3141);
  for (int t = 0; t < kInstances; ++t) {
    const ModuleCase& c = cases[t % cases.size()];
    const BimoduleParams b = default_bimodule_params(c.hbar, c.hbarP, c.eps, c.epsP, c.r, c.rP);
    const CylinderElement f = random_element(rng, c.hbar, 2), fg = random_element(rng, c.hbar, 2);
    const CylinderElement p = random_element(rng, c.hbarP, 2), q = random_element(rng, c.hbarP, 2);
    const Section xi = random_section(rng), eta = random_section(rng);
    g.see("left associativity", section_distance(left_act(f * fg, xi, b.left), left_act(f, left_act(fg, xi, b.left), b.left)), kTol);
    g.see("right associativity",
          section_distance(right_act(right_act(xi, p, b.right), q, b.right), right_act(xi, p * q, b.right)), kTol);
    g.see("left adjointness", std::abs(inner_L(left_act(f, xi, b.left), eta) - inner_L(xi, left_act(star(f), eta, b.left))), kTol);
    g.see("right adjointness",
          std::abs(inner_R(right_act(xi, p, b.right), eta) - inner_R(xi, right_act(eta, star(p), b.right))), kTol);
    g.see("bimodule compatibility",
          section_distance(left_act(f, right_act(xi, p, b.right), b.left), right_act(left_act(f, xi, b.left), p, b.right)),
          kTol);
    g.see("hermitian left linearity", distance(herm_L(left_act(f, xi, b.left), eta, b), f * herm_L(xi, eta, b)), kTol);
    g.see("hermitian right linearity", distance(herm_R(xi, right_act(eta, p, b.right), b), herm_R(xi, eta, b) * p), kTol);
  }
  // Hermitian compatibility where it is defined: r = r' = +-1 and equal hbar.
  int compat = 0;
  for (int t = 0; compat < kInstances && t < 100 * kInstances; ++t) {
    const ModuleCase& c = cases[t % cases.size()];
    if (!(c.r == c.rP && std::abs(c.r) == 1 && c.hbar == c.hbarP)) continue;
    ++compat;
    const BimoduleParams b = default_bimodule_params(c.hbar, c.hbarP, c.eps, c.epsP, c.r, c.rP);
    const Section xi = random_section(rng), eta = random_section(rng), psi = random_section(rng);
    g.see("hermitian compatibility",
          section_distance(left_act(herm_L(xi, eta, b), psi, b.left), right_act(xi, herm_R(eta, psi, b), b.right)), kTol);
  }
  if (compat < kInstances) g.fail("too few cases with r = r' = +-1 and equal hbar");
  for (int t = 0; t < kInstances; ++t) {
    const int r = 1 + t % 3;
    const BimoduleParams b = default_bimodule_params(0.5, 1.0, 0.4, 1.1, r, 1);
    std::vector<CylinderElement> F;
    for (int j = 0; j < r; ++j) F.push_back(random_element(rng, 0.5, 2));
    const auto back = phi_inverse(phi_to_section(F, b.left), b.left);
    double worst = 0.0;
    for (int j = 0; j < r; ++j) worst = std::max(worst, distance(back[j], F[j]));
    g.see("phi round trip r=" + std::to_string(r), worst, 1e-12);
  }
  return g.outcome();
}

Outcome criterion6() {
  Gate g;
  const ConnectionSolution s = solve_bimodule_connection(1.0, 2.0, 1.0, 0.0, 1, 2);
  g.see("closed-form curvature", std::abs(s.curvature + kPiI), 1e-15);
  Rng rng(1618);
  for (int t = 0; t < 10; ++t)
    g.see("measured curvature", std::abs(measure_curvature(random_section(rng), s.conn) + kPiI), 1e-10);
  for (int t = 0; t < 20; ++t) {
    double l0 = rng.uniform(-2, 2);
    if (std::abs(l0) < 0.1) l0 = 0.5;
    int r = rng.integer(1, 3) * (rng.integer(0, 1) ? 1 : -1);
    const ConnectionSolution e = solve_bimodule_connection(0.7, 0.7, l0, rng.uniform(-2, 2), r, r);
    g.see("equal hbar flat", std::abs(e.curvature), 1e-12);
  }
  for (int t = 0; t < 20; ++t) {
    double l0 = rng.uniform(-2, 2);
    if (std::abs(l0) < 0.1) l0 = -0.5;
    const int r = rng.integer(1, 3) * (rng.integer(0, 1) ? 1 : -1);
    const ConnectionSolution x = solve_bimodule_connection(1.0, 2.0, l0, rng.uniform(-2, 2), r, 2 * r);
    g.see("curvature independent of parameters", std::abs(x.curvature - s.curvature), 1e-12);
    x.params.validate();
  }
  return g.outcome();
}

Outcome criterion7() {
  Gate g;
  const FieldExpr k = log_cosh(variable());
  const Metric m = conformal_metric(k);
  const Christoffel G = christoffel(m);
  const CurvatureReport rep = curvature_tensor(m, G);
  for (int i = 0; i < 1000; ++i) {
    const double u = -5.0 + 10.0 * i / 999;
    const double kp = std::tanh(u);
    const double kpp = 1.0 / (std::cosh(u) * std::cosh(u));
    double worst = 0.0;
    worst = std::max(worst, std::abs(eval(G[0][0][0], u) - kp));
    worst = std::max(worst, std::abs(eval(G[1][0][1], u) - kp));
    worst = std::max(worst, std::abs(eval(G[1][1][0], u) - kp));
    worst = std::max(worst, std::abs(eval(G[0][1][1], u) + kp));
    worst = std::max({worst, std::abs(eval(G[0][0][1], u)), std::abs(eval(G[0][1][0], u)), std::abs(eval(G[1][0][0], u)),
                      std::abs(eval(G[1][1][1], u))});
    g.see("Christoffel closed form", worst, 1e-10);
    const double K = -std::exp(-2.0 * std::log(std::cosh(u))) * kpp;
    g.see("Gaussian curvature", std::abs(eval(rep.gaussian, u) - K), 1e-10);
  }
  const TotalCurvature t = total_curvature(k);
  g.see("catenoid total", std::abs(t.total - (-2.0)), 1e-6);
  g.see("quadrature vs slope", std::abs(t.total.real() - t.slope_formula), 1e-8);
  Rng rng(1414);
  for (int i = 0; i < 10; ++i) {
    const FieldExpr delta = gaussian(rng.uniform(0.5, 2), rng.uniform(-2, 2), rng.uniform(-0.5, 0.5));
    const PerturbationResult r = perturbation_invariance(k, delta);
    if (!r.precondition_holds) g.fail("perturbation precondition not met");
    g.see("Gauss-Bonnet invariance", std::abs(r.perturbed.total - r.base.total), 1e-6);
  }
  return g.outcome();
}

Outcome criterion8() {
  Gate g;
  const std::string cmd = std::string("\"") + NCCYL_CLI_PATH + "\" reproduce-all --format text > reproduce_all_output.txt 2>&1";
  const auto t0 = std::chrono::steady_clock::now();
  const int rc = std::system(cmd.c_str());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (rc != 0) g.fail("reproduce-all exit status " + std::to_string(rc));
  g.see("reproduce-all seconds", secs, 300.0);
  return g.outcome();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 trace of p_n equals n hbar", criterion1},
      {"2 Chern pairing equals n", criterion2},
      {"3 idempotence and orthogonality", criterion3},
      {"4 algebra identity suite", criterion4},
      {"5 bimodule suite", criterion5},
      {"6 connection curvature", criterion6},
      {"7 Riemannian suite", criterion7},
      {"8 reproduce-all under 5 minutes", criterion8},
  };
  bool all = true;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    const Outcome o = guarded(fn);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  criterion %s  (%.2f s)  %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
