#include "crp/harness/certio.hpp"

#include "crp/errors.hpp"

namespace crp::harness {

namespace {

const Json& at(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("certificate record lacks '") + key + "'");
  return j.at(key);
}

Json distance_json(const Distance& d) { return {{"norm", d.norm().str()}, {"powered", rational_json(d.powered())}}; }

Distance distance_from(const Json& j) {
  return Distance(PNorm::parse(at(j, "norm").get<std::string>()), rational_from(at(j, "powered")));
}

Json dims_json(const Dims& d) { return {{"N1", d.n1}, {"N2", d.n2}}; }
Dims dims_from(const Json& j) { return {at(j, "N1").get<std::size_t>(), at(j, "N2").get<std::size_t>()}; }

Json params_json(const InstanceParams& p) { return {{"u1", rational_json(p.u1)}, {"u2", rational_json(p.u2)}}; }
InstanceParams params_from(const Json& j) { return {rational_from(at(j, "u1")), rational_from(at(j, "u2"))}; }

Json solution_json(const SolutionSet& s) {
  if (const auto* p = std::get_if<PointSolution>(&s)) return {{"type", "point"}, {"point", vec_json(p->point)}};
  const auto& seg = std::get<SegmentSolution>(s);
  return {{"type", "segment"}, {"a", vec_json(seg.a)}, {"b", vec_json(seg.b)}};
}

SolutionSet solution_from(const Json& j) {
  const auto type = at(j, "type").get<std::string>();
  if (type == "point") return PointSolution{vec_from(at(j, "point"))};
  if (type == "segment") return SegmentSolution{vec_from(at(j, "a")), vec_from(at(j, "b"))};
  throw ParseError("unknown solution set type '" + type + "'");
}

// Fields shared by both certificate kinds.
template <class C>
void common_json(Json& j, const C& c) {
  j["solver_id"] = c.solver_id;
  j["solver_reference"] = c.solver_reference;
  j["descriptor"] = c.descriptor;
  j["family"] = family_json(c.family);
  j["dims"] = dims_json(c.dims);
  j["truth_params"] = params_json(c.truth_params);
  j["truth"] = solution_json(c.truth);
  j["answer"] = vec_json(c.answer);
  j["distance"] = distance_json(c.distance);
  j["fuel"] = c.fuel;
  j["verdict"] = c.verdict;
}

}  // namespace

Json rational_json(const Rational& r) { return r.canonical(); }

Rational rational_from(const Json& j) {
  if (!j.is_string()) throw ParseError("rational must be a \"num/den\" string");
  return Rational::parse_canonical(j.get<std::string>());
}

Json vec_json(const Vec& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(rational_json(x));
  return out;
}

Vec vec_from(const Json& j) {
  if (!j.is_array()) throw ParseError("vector must be an array");
  Vec v;
  for (const auto& x : j) v.push_back(rational_from(x));
  return v;
}

Json family_json(const Family& f) {
  Json j{{"kind", to_string(f.kind)}, {"kappa", rational_json(f.kappa)}, {"theta", rational_json(f.theta)},
         {"p", f.norm.str()}};
  if (f.kind == ProblemKind::BP) j["eta"] = rational_json(f.eta);
  if (f.kind == ProblemKind::LASSO) j["lambda"] = rational_json(f.lambda);
  return j;
}

Family family_from(const Json& j) {
  Family f;
  f.kind = parse_problem_kind(at(j, "kind").get<std::string>());
  f.kappa = rational_from(at(j, "kappa"));
  f.theta = rational_from(at(j, "theta"));
  f.norm = PNorm::parse(at(j, "p").get<std::string>());
  if (f.kind == ProblemKind::BP) f.eta = rational_from(at(j, "eta"));
  if (f.kind == ProblemKind::LASSO) f.lambda = rational_from(at(j, "lambda"));
  require_valid(f);
  return f;
}

Json certificate_json(const Certificate& cert) {
  Json j = Json::object();
  if (const auto* f = std::get_if<FailureCertificate>(&cert)) {
    j["kind"] = "failure";
    common_json(j, *f);
    return j;
  }
  const auto& e = std::get<ExitFlagCertificate>(cert);
  j["kind"] = "exitflag";
  common_json(j, e);
  j["checker_id"] = e.checker_id;
  j["checker_reference"] = e.checker_reference;
  j["checker_output"] = e.checker_output ? 1 : 0;
  j["true_flag"] = e.true_flag ? 1 : 0;
  j["range_violation"] = e.range_violation;
  j["alpha"] = rational_json(e.alpha);
  j["range_distance"] = distance_json(e.range_distance);
  return j;
}

Certificate certificate_from(const Json& j) {
  const auto kind = at(j, "kind").get<std::string>();
  if (kind == "failure") {
    return FailureCertificate{at(j, "solver_id").get<std::string>(),
                              at(j, "solver_reference").get<std::string>(),
                              at(j, "descriptor").get<std::string>(),
                              family_from(at(j, "family")),
                              dims_from(at(j, "dims")),
                              params_from(at(j, "truth_params")),
                              solution_from(at(j, "truth")),
                              vec_from(at(j, "answer")),
                              distance_from(at(j, "distance")),
                              at(j, "fuel").get<std::uint64_t>(),
                              at(j, "verdict").get<int>()};
  }
  if (kind == "exitflag") {
    return ExitFlagCertificate{at(j, "solver_id").get<std::string>(),
                               at(j, "solver_reference").get<std::string>(),
                               at(j, "checker_id").get<std::string>(),
                               at(j, "checker_reference").get<std::string>(),
                               at(j, "descriptor").get<std::string>(),
                               family_from(at(j, "family")),
                               dims_from(at(j, "dims")),
                               params_from(at(j, "truth_params")),
                               solution_from(at(j, "truth")),
                               vec_from(at(j, "answer")),
                               at(j, "checker_output").get<int>() != 0,
                               at(j, "true_flag").get<int>() != 0,
                               distance_from(at(j, "distance")),
                               at(j, "fuel").get<std::uint64_t>(),
                               at(j, "verdict").get<int>(),
                               at(j, "range_violation").get<bool>(),
                               rational_from(at(j, "alpha")),
                               distance_from(at(j, "range_distance"))};
  }
  throw ParseError("unknown certificate kind '" + kind + "'");
}

std::string certificate_payload(const Certificate& cert) { return certificate_json(cert).dump(2) + "\n"; }

Certificate parse_certificate(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ParseError(std::string("certificate is not valid JSON: ") + e.what());
  }
  try {
    return certificate_from(j);
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed certificate: ") + e.what());
  }
}

std::string recheck(const Certificate& cert) {
  return std::visit([](const auto& c) { return crp::recheck(c); }, cert);
}

std::string reverify(const Certificate& cert, const SubjectRegistry& registry) {
  return std::visit([&](const auto& c) { return crp::reverify(c, registry); }, cert);
}

const char* certificate_kind(const Certificate& cert) {
  return std::holds_alternative<FailureCertificate>(cert) ? "failure" : "exitflag";
}

}  // namespace crp::harness
