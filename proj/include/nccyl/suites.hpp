#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nccyl/bimodule.hpp"
#include "nccyl/connection.hpp"
#include "nccyl/cylinder.hpp"
#include "nccyl/expr_parser.hpp"
#include "nccyl/projections.hpp"
#include "nccyl/random.hpp"
#include "nccyl/riemannian.hpp"

namespace nccyl {

struct Check {
  std::string group;
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  std::optional<cplx> value;
  std::optional<cplx> expected;
  std::string error;  // non-empty when the computation itself threw

  bool pass() const { return error.empty() && std::isfinite(residual) && residual <= tolerance; }
};

struct Report {
  std::vector<Check> checks;
  nlohmann::json extra = nlohmann::json::object();

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
  }
  void append(const Report& o) {
    checks.insert(checks.end(), o.checks.begin(), o.checks.end());
    for (const auto& [k, v] : o.extra.items()) extra[k] = v;
  }
};

namespace detail {

// Tracks the worst residual of one named check across many instances.
class Worst {
 public:
  Worst(std::string group, std::string name, double tol) {
    c_.group = std::move(group);
    c_.name = std::move(name);
    c_.tolerance = tol;
  }
  void see(double r) {
    if (!std::isfinite(r)) r = std::numeric_limits<double>::infinity();
    c_.residual = std::max(c_.residual, r);
    ++count_;
  }
  Check done() const {
    Check c = c_;
    c.name += " [" + std::to_string(count_) + " instances]";
    return c;
  }

 private:
  Check c_;
  int count_ = 0;
};

inline Check value_check(std::string group, std::string name, std::optional<cplx> value,
                         std::optional<cplx> expected, double residual, double tol) {
  Check c;
  c.group = std::move(group);
  c.name = std::move(name);
  c.value = value;
  c.expected = expected;
  c.residual = residual;
  c.tolerance = tol;
  return c;
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

template <class F>
Check guarded(const std::string& group, const std::string& name, double tol, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    Check c;
    c.group = group;
    c.name = name;
    c.tolerance = tol;
    c.residual = std::numeric_limits<double>::infinity();
    c.error = e.what();
    return c;
  }
}

}  // namespace detail

using StarFn = std::function<CylinderElement(const CylinderElement&)>;

/// Involution with the shift applied in the wrong direction, for mutation checks.
inline CylinderElement star_sign_error(const CylinderElement& f) {
  std::map<int, FieldExpr> out;
  for (const auto& [k, a] : f.coeffs()) out.emplace(-k, conjugate(shift(a, k * f.hbar())));
  return CylinderElement(f.hbar(), std::move(out), f.decay_class());
}

struct AlgebraSuiteOptions {
  std::vector<double> hbars = {0.5, 1.0, 2.0};
  int instances = 100;  // per hbar
  std::uint64_t seed = 20240601;
  QuadratureConfig quad{};
  double tol = 1e-8;
  double psi_tol = 1e-6;
  StarFn star_fn = [](const CylinderElement& f) { return star(f); };
};

inline Report algebra_suite(const AlgebraSuiteOptions& o) {
  using detail::Worst;
  const std::string g = "algebra";
  Worst assoc(g, "associativity (fg)h = f(gh)", o.tol), anti(g, "star anti-homomorphism", o.tol),
      invol(g, "star involution", o.tol), leib1(g, "Leibniz d1", o.tol), leib2(g, "Leibniz d2", o.tol),
      comm(g, "d1 d2 = d2 d1", o.tol), herm1(g, "d1 commutes with star", o.tol),
      herm2(g, "d2 commutes with star", o.tol), cu(g, "(2 pi i / hbar)(fu - uf) = d2 f", o.tol),
      tcyc(g, "trace(fg) = trace(gf)", o.tol), td1(g, "trace(d1 f) = 0", o.tol),
      td2(g, "trace(d2 f) = 0", o.tol), tpos(g, "trace(f* f) >= 0", o.tol),
      therm(g, "trace(f*) = conj(trace(f))", o.tol), pcyc(g, "cocycle cyclicity", o.psi_tol),
      phoch(g, "cocycle Hochschild condition", o.psi_tol);
  Rng rng(o.seed);
  const auto& q = o.quad;
  const StarFn& st = o.star_fn;
  for (double h : o.hbars) {
    for (int t = 0; t < o.instances; ++t) {
      const auto f = random_element(rng, h), gg = random_element(rng, h), k = random_element(rng, h);
      const auto f3 = random_element(rng, h);
      assoc.see(distance((f * gg) * k, f * (gg * k), q));
      anti.see(distance(st(f * gg), st(gg) * st(f), q));
      invol.see(distance(st(st(f)), f, q));
      leib1.see(distance(d1(f * gg), d1(f) * gg + f * d1(gg), q));
      leib2.see(distance(d2(f * gg), d2(f) * gg + f * d2(gg), q));
      comm.see(distance(d1(d2(f)), d2(d1(f)), q));
      herm1.see(distance(st(d1(f)), d1(st(f)), q));
      herm2.see(distance(st(d2(f)), d2(st(f)), q));
      cu.see(distance(scale(commutator_with_u(f), kTwoPiI / h), d2(f), q));
      tcyc.see(std::abs(trace(f * gg, q) - trace(gg * f, q)));
      td1.see(std::abs(trace(d1(f), q)));
      td2.see(std::abs(trace(d2(f), q)));
      const cplx pos = trace(st(f) * f, q);
      tpos.see(std::max(-pos.real(), std::abs(pos.imag())));
      therm.see(std::abs(trace(st(f), q) - std::conj(trace(f, q))));
      pcyc.see(std::abs(cocycle_psi(k, f, gg, q) - cocycle_psi(f, gg, k, q)));
      phoch.see(std::abs(cocycle_psi(f * gg, k, f3, q) - cocycle_psi(f, gg * k, f3, q) +
                         cocycle_psi(f, gg, k * f3, q) - cocycle_psi(f3 * f, gg, k, q)));
    }
  }
  Report r;
  for (const auto* w : {&assoc, &anti, &invol, &leib1, &leib2, &comm, &herm1, &herm2, &cu, &tcyc, &td1,
                        &td2, &tpos, &therm, &pcyc, &phoch})
    r.checks.push_back(w->done());
  return r;
}

struct ProjectionSuiteOptions {
  std::vector<double> hbars = {0.5, 1.0, 2.0};
  std::vector<int> trace_ns = {1, 2, 3, 4};
  std::vector<int> chern_ns = {1, 2, 3, 4};
  std::vector<std::pair<int, int>> orth_pairs = {{1, 1}, {1, 2}, {2, 2}};
  QuadratureConfig quad{};
};

inline Report projection_suite(const ProjectionSuiteOptions& o) {
  Report r;
  const auto& q = o.quad;
  for (double h : o.hbars) {
    const BumpPair pair = build_bump_pair(h);
    for (int n : o.trace_ns) {
      const std::string tag = "n=" + std::to_string(n) + " hbar=" + detail::num(h);
      const auto p = build_pn(pair, n);
      r.checks.push_back(detail::guarded("projection", "trace " + tag, 1e-8, [&] {
        const cplx t = trace_pn(p, q);
        const double expect = n * h;
        return detail::value_check("projection", "trace " + tag, t, expect,
                                   std::abs(t - expect) / expect, 1e-8);
      }));
      r.checks.push_back(detail::guarded("projection", "trace imaginary part " + tag, 1e-10, [&] {
        const cplx t = trace_pn(p, q);
        return detail::value_check("projection", "trace imaginary part " + tag, t.imag(), 0.0,
                                   std::abs(t.imag()), 1e-10);
      }));
      if (std::find(o.chern_ns.begin(), o.chern_ns.end(), n) != o.chern_ns.end()) {
        r.checks.push_back(detail::guarded("projection", "chern " + tag, 1e-4, [&] {
          const cplx c = chern_number(p, q);
          return detail::value_check("projection", "chern " + tag, c, double(n), std::abs(c.real() - n), 1e-4);
        }));
        r.checks.push_back(detail::guarded("projection", "chern imaginary part " + tag, 1e-6, [&] {
          const cplx c = chern_number(p, q);
          return detail::value_check("projection", "chern imaginary part " + tag, c.imag(), 0.0,
                                     std::abs(c.imag()), 1e-6);
        }));
      }
      r.checks.push_back(detail::guarded("projection", "idempotence " + tag, 1e-8, [&] {
        return detail::value_check("projection", "idempotence " + tag, {}, {},
                                   distance(p.element * p.element, p.element, q), 1e-8);
      }));
      r.checks.push_back(detail::guarded("projection", "self-adjointness " + tag, 1e-12, [&] {
        return detail::value_check("projection", "self-adjointness " + tag, {}, {},
                                   distance(star(p.element), p.element, q), 1e-12);
      }));
      r.checks.push_back(detail::guarded("projection", "scalar projector conditions " + tag, 1e-10, [&] {
        const auto [fn, gn] = build_fn_gn(pair, n);
        const auto res = projector_residuals(fn, gn, h, -h, 2.0 * n * h + h);
        return detail::value_check("projection", "scalar projector conditions " + tag, {}, {},
                                   std::max({res.gg_shift, res.g_one_minus, res.gg_ff}), 1e-10);
      }));
    }
    for (auto [n, m] : o.orth_pairs) {
      const std::string tag = "(n,m)=(" + std::to_string(n) + "," + std::to_string(m) +
                              ") hbar=" + detail::num(h);
      const auto pn = build_pn(pair, n), pm = build_pn(pair, m), pnm = build_pn(pair, n + m);
      const auto tilde = shifted_projection(pm, n);
      r.checks.push_back(detail::guarded("projection", "orthogonality p_n p~_m = 0 " + tag, 1e-10, [&] {
        return detail::value_check("projection", "orthogonality p_n p~_m = 0 " + tag, {}, {},
                                   distance(pn.element * tilde, CylinderElement(h), q), 1e-10);
      }));
      r.checks.push_back(detail::guarded("projection", "direct sum p_n + p~_m = p_{n+m} " + tag, 1e-10, [&] {
        return detail::value_check("projection", "direct sum p_n + p~_m = p_{n+m} " + tag, {}, {},
                                   distance(pn.element + tilde, pnm.element, q), 1e-10);
      }));
    }
  }
  // Independence of the transition profile.
  for (double h : o.hbars) {
    const std::string tag = "hbar=" + detail::num(h);
    r.checks.push_back(detail::guarded("projection", "transition independence of trace " + tag, 1e-8, [&] {
      const auto a = build_pn(build_bump_pair(h), 1), b = build_pn(build_bump_pair(h, cubic_transition()), 1);
      return detail::value_check("projection", "transition independence of trace " + tag, trace_pn(b, q),
                                 trace_pn(a, q), std::abs(trace_pn(a, q) - trace_pn(b, q)), 1e-8);
    }));
    r.checks.push_back(detail::guarded("projection", "transition independence of chern " + tag, 1e-4, [&] {
      const auto a = build_pn(build_bump_pair(h), 1), b = build_pn(build_bump_pair(h, cubic_transition()), 1);
      return detail::value_check("projection", "transition independence of chern " + tag,
                                 chern_number(b, q), chern_number(a, q),
                                 std::abs(chern_number(a, q) - chern_number(b, q)), 1e-4);
    }));
  }
  r.checks.push_back(detail::guarded("projection", "6 * integral_0^1 (s - s^2) ds = 1", 1e-10, [&] {
    const FieldExpr s = variable();
    const cplx v = 6.0 * integrate(s - power(s, 2), 0.0, 1.0, q);
    return detail::value_check("projection", "6 * integral_0^1 (s - s^2) ds = 1", v, 1.0, std::abs(v - 1.0), 1e-10);
  }));
  return r;
}

struct ModuleSuiteOptions {
  int instances = 50;  // per parameter set
  std::uint64_t seed = 4242;
  QuadratureConfig quad{};
  double tol = 1e-8;
};

struct ModuleCase {
  double hbar, hbarP, eps, epsP;
  int r, rP;
};

inline std::vector<ModuleCase> default_module_cases() {
  return {{1.0, 1.0, 0.0, 1.0, 1, 1},
          {0.5, 0.5, 0.3, -0.7, 1, 1},
          {1.0, 2.0, 0.5, 1.5, 1, 2},
          {0.5, 1.0, 0.2, 1.1, 2, 1},
          {1.0, 1.0, 0.5, -1.0, -1, -1}};
}

inline Report module_suite(const ModuleSuiteOptions& o, const std::vector<ModuleCase>& cases = default_module_cases()) {
  using detail::Worst;
  const std::string g = "module";
  const double tol = o.tol;
  Worst lassoc(g, "left action associativity", tol), rassoc(g, "right action associativity", tol),
      bimod(g, "bimodule compatibility", tol), ladj(g, "left adjointness", tol), radj(g, "right adjointness", tol),
      pos(g, "inner_L positivity", 1e-10), hlin(g, "herm_L left linearity", tol),
      hrlin(g, "herm_R right linearity", tol), hsa(g, "herm_L self-adjoint", tol),
      hcompat(g, "herm compatibility <xi,eta>psi = xi<eta,psi>", tol), iso(g, "param_iso intertwining", tol),
      phil(g, "phi left intertwining", tol), phir(g, "phi right intertwining", tol),
      bounds(g, "herm_L mode bound", 0.0);
  Rng rng(o.seed);
  const auto& q = o.quad;
  for (const auto& c : cases) {
    const BimoduleParams b = default_bimodule_params(c.hbar, c.hbarP, c.eps, c.epsP, c.r, c.rP);
    b.validate();
    const bool compat_regime = (c.r == c.rP) && (c.r == 1 || c.r == -1) && std::abs(c.hbar - c.hbarP) < 1e-12;
    for (int t = 0; t < o.instances; ++t) {
      const auto f = random_element(rng, c.hbar), f2 = random_element(rng, c.hbar);
      const auto h = random_element(rng, c.hbarP), h2 = random_element(rng, c.hbarP);
      const auto xi = random_section(rng), eta = random_section(rng), psi = random_section(rng);
      lassoc.see(section_distance(left_act(f * f2, xi, b.left), left_act(f, left_act(f2, xi, b.left), b.left), q));
      rassoc.see(section_distance(right_act(right_act(xi, h, b.right), h2, b.right), right_act(xi, h * h2, b.right), q));
      bimod.see(section_distance(left_act(f, right_act(xi, h, b.right), b.left),
                                 right_act(left_act(f, xi, b.left), h, b.right), q));
      ladj.see(std::abs(inner_L(left_act(f, xi, b.left), eta, q) - inner_L(xi, left_act(star(f), eta, b.left), q)));
      radj.see(std::abs(inner_R(right_act(xi, h, b.right), eta, q) - inner_R(xi, right_act(eta, star(h), b.right), q)));
      const cplx n2 = inner_L(xi, xi, q);
      pos.see(n2.real() > 0 ? std::abs(n2.imag()) : std::numeric_limits<double>::infinity());
      const CylinderElement hx = herm_L(xi, eta, b);
      hlin.see(distance(herm_L(left_act(f, xi, b.left), eta, b), f * hx, q));
      hrlin.see(distance(herm_R(xi, right_act(eta, h, b.right), b), herm_R(xi, eta, b) * h, q));
      const CylinderElement hxx = herm_L(xi, xi, b);
      hsa.see(distance(star(hxx), hxx, q));
      int kmin = 1 << 30, kmax = -(1 << 30);
      for (const auto& s : {xi, eta})
        for (const auto& [k, fk] : s.slots()) {
          kmin = std::min(kmin, k);
          kmax = std::max(kmax, k);
        }
      for (int n : hx.modes()) bounds.see(std::abs(n) * std::abs(c.r) > kmax - kmin ? 1.0 : 0.0);
      if (compat_regime)
        hcompat.see(section_distance(left_act(herm_L(xi, eta, b), psi, b.left),
                                     right_act(xi, herm_R(eta, psi, b), b.right), q));
      const double tau = rng.uniform(0.5, 2.0) * (rng.integer(0, 1) ? 1.0 : -1.0);
      const LeftParams sp = scaled_left_params(b.left, tau);
      iso.see(section_distance(param_iso(left_act(f, xi, b.left), tau), left_act(f, param_iso(xi, tau), sp), q));
      if (c.r >= 1) {
        std::vector<CylinderElement> F;
        for (int j = 0; j < c.r; ++j) F.push_back(random_element(rng, c.hbar));
        std::vector<CylinderElement> fF;
        for (const auto& x : F) fF.push_back(f * x);
        phil.see(section_distance(phi_to_section(fF, b.left), left_act(f, phi_to_section(F, b.left), b.left), q));
        if (c.r == 1 && c.rP == 1 && std::abs(c.hbar - c.hbarP) < 1e-12) {
          const auto gq = random_element(rng, c.hbarP);
          phir.see(section_distance(phi_to_section({F[0] * gq}, b.left),
                                    right_act(phi_to_section(F, b.left), gq, b.right), q));
        }
      }
    }
  }
  Report r;
  for (const auto* w : {&lassoc, &rassoc, &bimod, &ladj, &radj, &pos, &hlin, &hrlin, &hsa, &hcompat, &iso,
                        &phil, &phir, &bounds})
    r.checks.push_back(w->done());
  // phi round trip, quadrature free.
  for (int rr : {1, 2, 3}) {
    Worst rt(g, "phi round trip r=" + std::to_string(rr), 1e-12);
    LeftParams p{0.8, -0.3, 0.0, rr, 1.0};
    p.eps = -(p.hbar + p.lambda1 * rr) / p.lambda0;
    for (int t = 0; t < o.instances; ++t) {
      std::vector<CylinderElement> F;
      for (int j = 0; j < rr; ++j) F.push_back(random_element(rng, p.hbar));
      const auto back = phi_inverse(phi_to_section(F, p), p);
      double worst = 0.0;
      for (int j = 0; j < rr; ++j)
        for (int n = -4; n <= 4; ++n)
          for (int i = 0; i <= 200; ++i) {
            const double u = -6.0 + 12.0 * i / 200;
            worst = std::max(worst, std::abs(eval(back[j].coeff(n), u) - eval(F[j].coeff(n), u)));
          }
      rt.see(worst);
      const Section xi = random_section(rng, 6);
      const Section again = phi_to_section(phi_inverse(xi, p), p);
      double w2 = 0.0;
      for (int k = -6; k <= 6; ++k)
        for (int i = 0; i <= 200; ++i) {
          const double x = -6.0 + 12.0 * i / 200;
          w2 = std::max(w2, std::abs(eval(again.slot(k), x) - eval(xi.slot(k), x)));
        }
      rt.see(w2);
    }
    r.checks.push_back(rt.done());
  }
  return r;
}

struct ConnectionSuiteOptions {
  double hbar = 1.0, hbarP = 2.0;
  int r = 1, rP = 2;
  double lambda0 = 1.0, lambda1 = 0.0;
  int trials = 20;
  std::uint64_t seed = 99;
  QuadratureConfig quad{};
};

inline Report connection_suite(const ConnectionSuiteOptions& o) {
  Report rep;
  const std::string g = "connection";
  const ConnectionSolution s = solve_bimodule_connection(o.hbar, o.hbarP, o.lambda0, o.lambda1, o.r, o.rP);
  const cplx closed = kTwoPiI * (o.hbar - o.hbarP) / (o.hbar * o.hbarP);
  const bool equal = s.kind == ConnectionCase::Equal;
  rep.extra["connection"] = {{"hbar", o.hbar},
                             {"hbar_prime", o.hbarP},
                             {"case", equal ? "equal" : "rational"},
                             {"params", {{"lambda0", s.params.left.lambda0}, {"lambda1", s.params.left.lambda1},
                                         {"eps", s.params.left.eps}, {"r", s.params.left.r},
                                         {"mu0", s.params.right.mu0}, {"mu1", s.params.right.mu1},
                                         {"eps_prime", s.params.right.epsP}, {"r_prime", s.params.right.rP}}},
                             {"alpha", {{"re", s.conn.alpha.real()}, {"im", s.conn.alpha.imag()}}},
                             {"beta", {{"re", s.conn.beta.real()}, {"im", s.conn.beta.imag()}}},
                             {"gamma", {{"re", s.conn.gamma.real()}, {"im", s.conn.gamma.imag()}}},
                             {"curvature", {{"re", s.curvature.real()}, {"im", s.curvature.imag()}}},
                             {"closed_form", {{"re", closed.real()}, {"im", closed.imag()}}}};
  rep.checks.push_back(detail::value_check(g, "bimodule constraint residual", {}, {},
                                           s.params.residuals().max_abs(), 1e-12));
  rep.checks.push_back(detail::value_check(g, "curvature equals 2 pi i (hbar - hbar') / (hbar hbar')",
                                           s.curvature, closed, std::abs(s.curvature - closed), 1e-12));
  if (equal)
    rep.checks.push_back(detail::value_check(g, "flat when hbar = hbar'", s.curvature, 0.0, std::abs(s.curvature), 1e-12));
  const auto L = check_left_leibniz(s.conn, s.params.left, o.trials, o.seed, o.quad);
  const auto R = check_right_leibniz(s.conn, s.params.right, o.trials, o.seed + 1, o.quad);
  rep.extra["connection"]["leibniz_residuals"] = {{"left_nabla1", L.nabla1}, {"left_nabla2", L.nabla2},
                                                  {"right_nabla1", R.nabla1}, {"right_nabla2", R.nabla2}};
  rep.checks.push_back(detail::value_check(g, "left Leibniz", {}, {}, L.max(), 1e-8));
  rep.checks.push_back(detail::value_check(g, "right Leibniz", {}, {}, R.max(), 1e-8));
  Rng rng(o.seed + 2);
  detail::Worst meas(g, "measured (nabla1 nabla2 - nabla2 nabla1) xi / xi", 1e-10);
  detail::Worst endo(g, "curvature commutes with the left action", 1e-10);
  detail::Worst ind(g, "induced derivations reproduce d1, d2 on the right", 1e-8);
  for (int t = 0; t < o.trials; ++t) {
    const Section xi = random_section(rng);
    meas.see(std::abs(measure_curvature(xi, s.conn) - s.curvature));
    const CylinderElement f = random_element(rng, o.hbar);
    endo.see(section_distance(curvature_apply(left_act(f, xi, s.params.left), s.conn),
                              left_act(f, curvature_apply(xi, s.conn), s.params.left), o.quad));
    const CylinderElement fp = random_element(rng, o.hbarP);
    for (int k : {1, 2}) {
      ind.see(induced_derivation_residual(xi, fp, k, s.conn, s.params, o.quad));
      ind.see(distance(induced_derivation(fp, k, s.conn, s.params), k == 1 ? d1(fp) : d2(fp), o.quad));
    }
  }
  rep.checks.push_back(meas.done());
  rep.checks.push_back(endo.done());
  rep.checks.push_back(ind.done());
  // Curvature depends only on (hbar, hbar').
  detail::Worst indep(g, "curvature independent of lambda0, lambda1", 1e-12);
  for (int t = 0; t < 20; ++t) {
    const double l0 = rng.uniform(0.25, 4.0) * (rng.integer(0, 1) ? 1.0 : -1.0);
    const double l1 = rng.uniform(-2.0, 2.0);
    const auto si = solve_bimodule_connection(o.hbar, o.hbarP, l0, l1, o.r, o.rP);
    indep.see(std::abs(si.curvature - s.curvature));
    const auto Li = check_left_leibniz(si.conn, si.params.left, 2, o.seed + 10 + t, o.quad);
    const auto Ri = check_right_leibniz(si.conn, si.params.right, 2, o.seed + 40 + t, o.quad);
    indep.see(std::max(Li.max(), Ri.max()) > 1e-8 ? 1.0 : 0.0);
  }
  rep.checks.push_back(indep.done());
  // Constant curvature family on the left module.
  {
    const cplx R0(1.0, 1.0);
    const ConnParams c = constant_curvature_connection(s.params.left, R0);
    const Section xi = random_section(rng);
    rep.checks.push_back(detail::value_check(g, "constant curvature connection R = 1 + i",
                                             measure_curvature(xi, c), R0,
                                             std::abs(measure_curvature(xi, c) - R0), 1e-10));
    rep.checks.push_back(detail::value_check(g, "constant curvature connection left Leibniz", {}, {},
                                             check_left_leibniz(c, s.params.left, 5, o.seed + 3, o.quad).max(), 1e-8));
  }
  return rep;
}

struct CurvatureSuiteOptions {
  std::string k_expr = "ln(cosh(u))";
  std::optional<double> expected_total = -2.0;
  int perturbations = 10;
  std::uint64_t seed = 7;
  int grid = 1000;
  double lo = -5.0, hi = 5.0;
  QuadratureConfig quad{};
};

inline Report curvature_suite(const CurvatureSuiteOptions& o) {
  Report rep;
  const std::string g = "curvature";
  const FieldExpr k = parse_expr(o.k_expr);
  const Metric m = conformal_metric(k);
  const Christoffel G = christoffel(m);
  const CurvatureReport cr = curvature_tensor(m, G);
  const FieldExpr dk = derivative(k), ddk = derivative(dk);
  double chr = 0.0, gk = 0.0, sym = 0.0;
  nlohmann::json chris = nlohmann::json::array(), gauss = nlohmann::json::array();
  const int stride = std::max(1, o.grid / 10);
  for (int i = 0; i < o.grid; ++i) {
    const double u = o.lo + (o.hi - o.lo) * i / (o.grid - 1);
    const cplx kp = eval(dk, u);
    const cplx expect[2][2][2] = {{{kp, 0.0}, {0.0, -kp}}, {{0.0, kp}, {kp, 0.0}}};
    for (int l = 0; l < 2; ++l)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) chr = std::max(chr, std::abs(eval(G[l][a][b], u) - expect[l][a][b]));
    const cplx K = eval(cr.gaussian, u);
    const cplx Kc = -std::exp(-2.0 * eval(k, u)) * eval(ddk, u);
    gk = std::max(gk, std::abs(K - Kc));
    // h(e_2, R(d_1, d_2) e_1)
    const cplx r2 = eval(m.h[1][0], u) * eval(cr.riemann[0][0][0][1], u) +
                    eval(m.h[1][1], u) * eval(cr.riemann[1][0][0][1], u);
    sym = std::max(sym, std::abs(eval(cr.R1212, u) + r2));
    if (i % stride == 0) {
      chris.push_back({{"u", u}, {"gamma1_11", eval(G[0][0][0], u).real()}, {"gamma1_22", eval(G[0][1][1], u).real()},
                       {"gamma2_12", eval(G[1][0][1], u).real()}});
      gauss.push_back({{"u", u}, {"K", K.real()}});
    }
  }
  rep.checks.push_back(detail::value_check(g, "Christoffel symbols match k' closed forms", {}, {}, chr, 1e-10));
  rep.checks.push_back(detail::value_check(g, "K = -exp(-2k) k''", {}, {}, gk, 1e-10));
  rep.checks.push_back(detail::value_check(g, "R1212 = -h(e2, R(d1,d2) e1)", {}, {}, sym, 1e-10));
  const auto comp = verify_pseudo_riemannian(m, G, o.lo, o.hi, o.grid);
  rep.checks.push_back(detail::value_check(g, "metric compatibility and torsion", {}, {}, comp.max(), 1e-9));
  const TotalCurvature tc = total_curvature(k, cr, o.quad);
  rep.checks.push_back(detail::value_check(g, "quadrature vs boundary-slope total", tc.total, tc.slope_formula,
                                           std::abs(tc.total - tc.slope_formula), 1e-8));
  if (o.expected_total)
    rep.checks.push_back(detail::value_check(g, "total curvature", tc.total, *o.expected_total,
                                             std::abs(tc.total - *o.expected_total), 1e-6));
  Rng rng(o.seed);
  detail::Worst inv(g, "total curvature invariant under Gaussian perturbations", 1e-6);
  for (int t = 0; t < o.perturbations; ++t) {
    const FieldExpr delta = gaussian(rng.uniform(0.5, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-1.0, 1.0));
    const auto pr = perturbation_invariance(k, delta, o.quad);
    inv.see(std::abs(pr.perturbed.total - pr.base.total));
  }
  rep.checks.push_back(inv.done());
  rep.extra["curvature"] = {{"metric", "conformal"},
                            {"k_expr", o.k_expr},
                            {"christoffel_samples", chris},
                            {"gaussian_samples", gauss},
                            {"total_curvature", tc.total.real()},
                            {"slope_formula_value", tc.slope_formula},
                            {"truncation_U", tc.U},
                            {"normalized_total", 2.0 * std::numbers::pi * tc.total.real()}};
  return rep;
}

}  // namespace nccyl
