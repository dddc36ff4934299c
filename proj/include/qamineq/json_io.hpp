#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qamineq/analyze.hpp"

namespace qamineq {

using nlohmann::json;

namespace detail {

inline const json& require_field(const json& j, const char* field, const char* ctx) {
  if (!j.is_object() || !j.contains(field))
    throw IoError(std::string(ctx) + ": missing field '" + field + "'");
  return j.at(field);
}

inline double number_field(const json& j, const char* ctx) {
  if (!j.is_number()) throw IoError(std::string(ctx) + ": expected a number");
  return j.get<double>();
}

}  // namespace detail

// Endpoints serialize as numbers, with "inf"/"-inf" for the unbounded sides.
inline double parse_endpoint(const json& v) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    throw IoError("endpoint: expected a number, \"inf\" or \"-inf\", got \"" + s + "\"");
  }
  return detail::number_field(v, "endpoint");
}

inline json endpoint_to_json(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

inline Interval parse_interval(const json& v, const char* ctx) {
  if (!v.is_array() || v.size() != 2)
    throw IoError(std::string(ctx) + ": expected [lo, hi]");
  return {parse_endpoint(v[0]), parse_endpoint(v[1])};
}

inline Primitive parse_primitive(const json& j) {
  const std::string kind = detail::require_field(j, "kind", "piece").get<std::string>();
  const json params = j.contains("params") ? j.at("params") : json::object();
  Primitive p = [&] {
    if (kind == "affine")
      return Primitive::affine(detail::number_field(detail::require_field(params, "slope", "affine"), "slope"),
                               detail::number_field(detail::require_field(params, "intercept", "affine"), "intercept"));
    if (kind == "power")
      return Primitive::power(detail::number_field(detail::require_field(params, "exponent", "power"), "exponent"));
    if (kind == "exponential")
      return Primitive::exponential(detail::number_field(detail::require_field(params, "rate", "exponential"), "rate"));
    if (kind == "logarithm")
      return Primitive::logarithm(detail::number_field(detail::require_field(params, "base", "logarithm"), "base"));
    throw IoError("piece: unknown kind '" + kind + "'");
  }();
  if (j.value("reflected", false)) p = p.reflect();
  return p;
}

inline json primitive_to_json(const Primitive& p) {
  json out;
  switch (p.kind()) {
    case PrimitiveKind::Affine:
      out = {{"kind", "affine"}, {"params", {{"slope", p.param_a()}, {"intercept", p.param_b()}}}};
      break;
    case PrimitiveKind::Power:
      out = {{"kind", "power"}, {"params", {{"exponent", p.param_a()}}}};
      break;
    case PrimitiveKind::Exponential:
      out = {{"kind", "exponential"}, {"params", {{"rate", p.param_a()}}}};
      break;
    case PrimitiveKind::Logarithm:
      out = {{"kind", "logarithm"}, {"params", {{"base", p.param_a()}}}};
      break;
  }
  if (p.reflected()) out["reflected"] = true;
  return out;
}

inline Piece parse_piece(const json& j) {
  if (j.is_object() && j.value("kind", "") == "chain") {
    std::vector<Primitive> chain;
    for (const json& part : detail::require_field(j, "parts", "chain"))
      chain.push_back(parse_primitive(part));
    return Piece(std::move(chain));
  }
  return Piece(parse_primitive(j));
}

inline json piece_to_json(const Piece& p) {
  if (p.chain().size() == 1) return primitive_to_json(p.chain()[0]);
  json parts = json::array();
  for (const Primitive& prim : p.chain()) parts.push_back(primitive_to_json(prim));
  return {{"kind", "chain"}, {"parts", parts}};
}

inline GeneratorFn parse_generator(const json& j) {
  const Interval dom = parse_interval(detail::require_field(j, "domain", "generator"), "domain");
  std::vector<Piece> pieces;
  for (const json& pj : detail::require_field(j, "pieces", "generator")) pieces.push_back(parse_piece(pj));
  std::vector<double> bps, jumps;
  if (j.contains("breakpoints"))
    for (const json& b : j.at("breakpoints")) bps.push_back(detail::number_field(b, "breakpoint"));
  if (j.contains("jump_values"))
    for (const json& v : j.at("jump_values"))
      jumps.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                  : detail::number_field(v, "jump value"));
  return GeneratorFn(dom, std::move(pieces), std::move(bps), std::move(jumps));
}

inline json generator_to_json(const GeneratorFn& f) {
  json out;
  out["domain"] = {endpoint_to_json(f.domain().lo()), endpoint_to_json(f.domain().hi())};
  out["pieces"] = json::array();
  for (const Piece& p : f.pieces()) out["pieces"].push_back(piece_to_json(p));
  out["breakpoints"] = f.breakpoints();
  out["jump_values"] = f.jump_values();
  return out;
}

inline Coupler parse_coupler(const json& j, int k) {
  const std::string kind = detail::require_field(j, "kind", "coupler").get<std::string>();
  const json params = j.contains("params") ? j.at("params") : json::object();
  if (kind == "sum") return Coupler::sum(k);
  if (kind == "product") return Coupler::product(k);
  if (kind == "arithmetic_mean") return Coupler::arithmetic_mean(k);
  if (kind == "power_sum")
    return Coupler::power_sum(k, detail::number_field(detail::require_field(params, "r", "power_sum"), "r"));
  if (kind == "constant")
    return Coupler::constant(k, detail::number_field(detail::require_field(params, "value", "constant"), "value"));
  if (kind == "affine") {
    std::vector<double> c;
    for (const json& v : detail::require_field(params, "c", "affine coupler"))
      c.push_back(detail::number_field(v, "coefficient"));
    if (static_cast<int>(c.size()) != k) throw IoError("affine coupler: needs k coefficients");
    return Coupler::affine(detail::number_field(detail::require_field(params, "c0", "affine coupler"), "c0"),
                           std::move(c));
  }
  throw IoError("coupler: unknown kind '" + kind + "'");
}

inline json coupler_to_json(const Coupler& c) {
  switch (c.kind()) {
    case CouplerKind::Sum: return {{"kind", "sum"}};
    case CouplerKind::Product: return {{"kind", "product"}};
    case CouplerKind::ArithmeticMean: return {{"kind", "arithmetic_mean"}};
    case CouplerKind::PowerSum: return {{"kind", "power_sum"}, {"params", {{"r", c.param()}}}};
    case CouplerKind::Constant: return {{"kind", "constant"}, {"params", {{"value", c.param()}}}};
    case CouplerKind::Affine:
      return {{"kind", "affine"}, {"params", {{"c0", c.param()}, {"c", c.coeffs()}}}};
  }
  throw Error("unreachable");
}

inline InequalityProblem parse_problem(const json& j) {
  const int k = detail::require_field(j, "k", "problem").get<int>();
  if (k < 1) throw IoError("problem: k must be >= 1");
  std::vector<GeneratorFn> gens;
  for (const json& g : detail::require_field(j, "generators", "problem"))
    gens.push_back(parse_generator(g));
  if (static_cast<int>(gens.size()) != k + 1)
    throw IoError("problem: expected k+1 generators");
  std::vector<Interval> box;
  for (const json& b : detail::require_field(j, "box", "problem"))
    box.push_back(parse_interval(b, "box"));
  if (static_cast<int>(box.size()) != k) throw IoError("problem: box needs k intervals");
  Coupler phi = parse_coupler(detail::require_field(j, "phi", "problem"), k);
  Coupler Phi = parse_coupler(detail::require_field(j, "Phi", "problem"), k);
  return InequalityProblem(std::move(gens), std::move(phi), std::move(Phi), std::move(box));
}

inline json certificate_to_json(const Certificate& c) {
  json grid = json::array(), coeffs = json::array(), residuals = json::array();
  for (const CertificateEntry& e : c.entries) {
    grid.push_back(e.base);
    coeffs.push_back(e.coeffs);
    residuals.push_back(e.residual);
  }
  return {{"grid", grid}, {"coeffs", coeffs}, {"entry_residuals", residuals}, {"residual", c.residual}};
}

inline Certificate parse_certificate(const json& j) {
  Certificate c;
  const json& grid = detail::require_field(j, "grid", "certificate");
  const json& coeffs = detail::require_field(j, "coeffs", "certificate");
  if (grid.size() != coeffs.size()) throw IoError("certificate: grid/coeffs size mismatch");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CertificateEntry e;
    for (const json& v : grid[i]) e.base.push_back(detail::number_field(v, "grid point"));
    for (const json& v : coeffs[i]) e.coeffs.push_back(detail::number_field(v, "coefficient"));
    if (j.contains("entry_residuals")) e.residual = j.at("entry_residuals")[i].get<double>();
    c.entries.push_back(std::move(e));
  }
  c.residual = detail::require_field(j, "residual", "certificate").get<double>();
  return c;
}

inline json counterexample_to_json(const Counterexample& ce) {
  return {{"points", ce.points},
          {"lambda", ce.lambda},
          {"lhs", ce.lhs},
          {"rhs", ce.rhs},
          {"violation", ce.violation()}};
}

inline Counterexample parse_counterexample(const json& j) {
  Counterexample ce;
  for (const json& row : detail::require_field(j, "points", "counterexample")) {
    std::vector<double> r;
    for (const json& v : row) r.push_back(detail::number_field(v, "point"));
    ce.points.push_back(std::move(r));
  }
  for (const json& v : detail::require_field(j, "lambda", "counterexample"))
    ce.lambda.push_back(detail::number_field(v, "weight"));
  ce.lhs = detail::require_field(j, "lhs", "counterexample").get<double>();
  ce.rhs = detail::require_field(j, "rhs", "counterexample").get<double>();
  return ce;
}

inline json verdict_to_json(const Verdict& v) {
  json out;
  out["status"] = v.status == VerdictStatus::HoldsCertified ? "holds_certified"
                  : v.status == VerdictStatus::Fails        ? "fails"
                                                            : "undecided";
  out["agreement"] = {{"precheck", v.agreement.precheck},
                      {"gamma", v.agreement.gamma},
                      {"concavity", v.agreement.concavity},
                      {"e2", v.agreement.e2},
                      {"certificate", v.agreement.certificate},
                      {"falsifier", v.agreement.falsifier},
                      {"jensen", v.agreement.jensen}};
  json evidence = json::object();
  if (v.certificate) evidence["certificate"] = certificate_to_json(*v.certificate);
  if (v.counterexample) evidence["counterexample"] = counterexample_to_json(*v.counterexample);
  if (v.concavity) {
    const auto& c = *v.concavity;
    evidence["concavity"] = {
        {"status", c.status == ConcavityReport::Status::Concave      ? "concave"
                   : c.status == ConcavityReport::Status::NotConcave ? "not_concave"
                                                                     : "unsupported"},
        {"max_midpoint_deficit", c.max_midpoint_deficit},
        {"max_hessian_eigenvalue", c.max_hessian_eigenvalue}};
    if (!c.witness_u.empty() && c.status == ConcavityReport::Status::NotConcave) {
      evidence["concavity"]["witness_u"] = c.witness_u;
      evidence["concavity"]["witness_v"] = c.witness_v;
    }
  }
  out["evidence"] = evidence;
  if (!v.note.empty()) out["note"] = v.note;
  return out;
}

}  // namespace qamineq
