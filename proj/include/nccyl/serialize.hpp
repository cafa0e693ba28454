#pragma once

#include <string>

#include "json.hpp"
#include "nccyl/bimodule.hpp"
#include "nccyl/connection.hpp"
#include "nccyl/cylinder.hpp"
#include "nccyl/error.hpp"
#include "nccyl/expr_parser.hpp"

namespace nccyl {

using json = nlohmann::json;

inline json complex_to_json(cplx c) { return {{"re", c.real()}, {"im", c.imag()}}; }

inline std::string decay_name(DecayClass d) {
  return d == DecayClass::SchwartzLike ? "schwartz-like" : "extended";
}

inline json element_to_json(const CylinderElement& f) {
  json modes = json::array();
  for (const auto& [n, c] : f.coeffs()) modes.push_back({{"n", n}, {"expr", to_string(c)}});
  return {{"hbar", f.hbar()}, {"modes", modes}, {"decay_class", decay_name(f.decay_class())}};
}

inline CylinderElement element_from_json(const json& j) {
  try {
    std::map<int, FieldExpr> coeffs;
    for (const auto& m : j.at("modes")) {
      const int n = m.at("n").get<int>();
      if (coeffs.count(n)) throw InvalidArgument("duplicate mode " + std::to_string(n));
      coeffs.emplace(n, parse_expr(m.at("expr").get<std::string>()));
    }
    std::optional<DecayClass> d;
    if (j.contains("decay_class")) {
      const auto s = j.at("decay_class").get<std::string>();
      if (s == "extended") d = DecayClass::Extended;
      else if (s == "schwartz-like") d = DecayClass::SchwartzLike;
      else throw InvalidArgument("unknown decay_class '" + s + "'");
    }
    return CylinderElement(j.at("hbar").get<double>(), std::move(coeffs), d);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed element document: ") + e.what());
  }
}

inline json section_to_json(const Section& s) {
  json slots = json::array();
  for (const auto& [k, f] : s.slots()) slots.push_back({{"k", k}, {"expr", to_string(f)}});
  return {{"slots", slots}};
}

inline Section section_from_json(const json& j) {
  try {
    std::map<int, FieldExpr> slots;
    for (const auto& s : j.at("slots")) {
      const int k = s.at("k").get<int>();
      if (slots.count(k)) throw InvalidArgument("duplicate slot " + std::to_string(k));
      slots.emplace(k, parse_expr(s.at("expr").get<std::string>()));
    }
    return Section(std::move(slots));
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed section document: ") + e.what());
  }
}

inline json params_to_json(const BimoduleParams& b) {
  return {{"lambda0", b.left.lambda0}, {"lambda1", b.left.lambda1}, {"eps", b.left.eps},
          {"r", b.left.r},             {"hbar", b.left.hbar},       {"mu0", b.right.mu0},
          {"mu1", b.right.mu1},        {"eps_prime", b.right.epsP}, {"r_prime", b.right.rP},
          {"hbar_prime", b.right.hbarP}};
}

inline BimoduleParams params_from_json(const json& j) {
  try {
    BimoduleParams b;
    b.left = {j.at("lambda0").get<double>(), j.at("lambda1").get<double>(), j.at("eps").get<double>(),
              j.at("r").get<int>(), j.at("hbar").get<double>()};
    b.right = {j.at("mu0").get<double>(), j.at("mu1").get<double>(), j.at("eps_prime").get<double>(),
               j.at("r_prime").get<int>(), j.at("hbar_prime").get<double>()};
    return b;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed parameter document: ") + e.what());
  }
}

inline json conn_to_json(const ConnParams& c) {
  return {{"alpha", complex_to_json(c.alpha)}, {"beta", complex_to_json(c.beta)},
          {"gamma", complex_to_json(c.gamma)}};
}

}  // namespace nccyl
