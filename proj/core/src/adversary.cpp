#include "crp/adversary.hpp"

#include "crp/builtins.hpp"
#include "crp/errors.hpp"

namespace crp {

namespace {

RunComplete uncapped_run(const MarkovInput& input, const std::string& who) {
  const auto first = input.fresh_run(std::nullopt);
  const auto* top = std::get_if<RunComplete>(&first);
  if (!top) throw EngineBugError("uncapped run of " + who + " aborted");
  // The memoized path must agree with a fresh replay.
  const auto second = input.metered_run(std::nullopt);
  if (second != first) throw DeterminismViolation(who + " produced different outcomes on replay");
  return *top;
}

// F3 at pool t and F4 at pool t-1, the two pools the certificate relies on.
void check_threshold(const MarkovInput& input, const RunComplete& top, const std::string& who) {
  const auto at_t = input.fresh_run(top.fuel);
  const auto* c = std::get_if<RunComplete>(&at_t);
  if (!c || c->verdict != top.verdict || c->fuel != top.fuel) {
    throw ContractError(who + ": run capped at its own fuel " + std::to_string(top.fuel) + " gave " + describe(at_t));
  }
  if (!std::holds_alternative<RunAborted>(input.fresh_run(top.fuel - 1))) {
    throw ContractError(who + ": run capped below its fuel completed");
  }
}

ProblemInstance instance_for_verdict(const Family& family, const Dims& dims, int verdict, std::uint64_t fuel) {
  if (verdict == 3) return ProblemInstance(family, dims, InstanceParams{});
  return iota_anchor(family, dims, verdict, fuel);
}

Vec replay_answer(const SolverPtr& solver, const MarkovInput& input, const Vec& expected) {
  DirectAccess access(input);
  Vec answer = solver->invoke(access, input.context());
  if (answer != expected) {
    throw DeterminismViolation("solver '" + solver->id() + "' answered " + format_vec(answer) + " on replay, " +
                               format_vec(expected) + " during the metered run");
  }
  return answer;
}

std::string check_truth(const Family& family, const Dims& dims, const InstanceParams& params,
                        const SolutionSet& truth, std::optional<ProblemInstance>& out) {
  try {
    out.emplace(family, dims, params);
  } catch (const Error& e) {
    return std::string("ground-truth instance is invalid: ") + e.what();
  }
  if (solve_closed_form(*out) != truth) return "embedded solution set differs from the closed form";
  return {};
}

}  // namespace

FailureCertificate attack_solver(const SolverPtr& solver, const Family& family, const Dims& dims,
                                 const AttackOptions& options) {
  auto input = make_diagonal(family, dims, solver);
  if (options.max_fuel) input.set_fuel_guard(options.max_fuel);
  const auto top = uncapped_run(input, solver->id());
  check_threshold(input, top, solver->id());
  const auto iota = instance_for_verdict(family, dims, top.verdict, top.fuel);
  const auto answer = replay_answer(solver, input, top.answer);
  auto truth = solve_closed_form(iota);
  auto distance = distance_to(truth, answer, family.norm);
  FailureCertificate cert{solver->id(),    solver->identity.reference(),
                          input.text(),    family,
                          dims,            iota.params(),
                          std::move(truth), answer,
                          std::move(distance), top.fuel,
                          top.verdict};
  if (const auto reason = recheck(cert); !reason.empty()) {
    throw EngineBugError("certificate for '" + solver->id() + "' failed its own re-check: " + reason);
  }
  return cert;
}

BatchReport batch_attack(const SolverPtr& solver, const Family& family, std::size_t count, std::size_t base_n1,
                         const AttackOptions& options) {
  if (count < 1) throw DomainError("batch size must be at least 1");
  BatchReport report;
  report.declared_size = solver->identity.declared_size;
  for (std::size_t k = 0; k < count; ++k) {
    const Dims dims{base_n1 + k, 1};
    auto cert = attack_solver(solver, family, dims, options);
    const auto input = make_diagonal(family, dims, solver);
    const auto& g = std::get<DiagonalDescriptor>(input.descriptor());
    if (k == 0) report.engine_constant = engine_constant(g);
    LengthRow row{dims.n1, descriptor_bytes(input),
                  report.declared_size + report.engine_constant + decimal_digits(dims.n1)};
    if (row.bytes > row.bound) report.lengths_ok = false;
    report.lengths.push_back(row);
    report.certificates.push_back(std::move(cert));
  }
  return report;
}

bool exit_flag_truth(const SolverPtr& solver, const MarkovInput& input) {
  DirectAccess access(input);
  const Vec answer = solver->invoke(access, input.context());
  const auto truth = solve_closed_form(input.ground_truth());
  return distance_to(truth, answer, input.family().norm).within(input.family().kappa);
}

ExitFlagCertificate attack_checker(const SolverPtr& solver, const CheckerPtr& checker, const Family& family,
                                   const Dims& dims, const AttackOptions& options) {
  auto input = make_exitflag_diagonal(family, dims, solver, checker);
  if (options.max_fuel) input.set_fuel_guard(options.max_fuel);
  const std::string who = solver->id() + "/" + checker->id();
  const auto top = uncapped_run(input, who);
  check_threshold(input, top, who);
  const auto iota = instance_for_verdict(family, dims, top.verdict, top.fuel);
  const auto answer = replay_answer(solver, input, top.answer);
  DirectAccess access(input);
  const bool e = checker->invoke(access, input.context(), answer);
  if (!top.flag || e != *top.flag) throw DeterminismViolation("checker '" + checker->id() + "' changed its output on replay");

  auto truth = solve_closed_form(iota);
  auto distance = distance_to(truth, answer, family.norm);
  const bool true_flag = distance.within(family.kappa);
  const auto anchors = anchor_sets(family, dims);
  auto range = dist_segment(answer, anchors.s0.a, anchors.s0.b, family.norm);
  const bool violation = range.exceeds(options.alpha);
  ExitFlagCertificate cert{solver->id(),
                           solver->identity.reference(),
                           checker->id(),
                           checker->identity.reference(),
                           input.text(),
                           family,
                           dims,
                           iota.params(),
                           std::move(truth),
                           answer,
                           e,
                           true_flag,
                           std::move(distance),
                           top.fuel,
                           top.verdict,
                           violation,
                           options.alpha,
                           std::move(range)};
  if (const auto reason = recheck(cert); !reason.empty()) {
    throw EngineBugError("exit-flag certificate for '" + who + "' failed its own re-check: " + reason);
  }
  return cert;
}

std::optional<int> verdict_extractor(const MarkovInput& input, std::uint64_t budget) {
  if (!input.is_diagonal()) throw NotApplicable("verdict extractor needs a diagonal input");
  const auto outcome = input.metered_run(budget);
  if (const auto* c = std::get_if<RunComplete>(&outcome); c && c->verdict != 3) return c->verdict;
  return std::nullopt;
}

int select_probe_branch(InputAccess& access, const SubjectRegistry& registry, const StripBudgets& budgets) {
  const MarkovInput input(parse_descriptor(access.program(), registry));
  if (input.is_diagonal()) {
    if (const auto v = verdict_extractor(input, budgets.extractor)) return *v;
    throw NotApplicable("verdict extractor did not settle within budget " + std::to_string(budgets.extractor));
  }
  if (const auto hit = gamma_star_scan(access, budgets.scan)) return hit->branch;
  throw NotApplicable("probe branch not settled within precision " + std::to_string(budgets.scan));
}

CheckerPtr strip_oracle_checker(const OracleCheckerHandle& oracle_checker,
                                std::shared_ptr<const SubjectRegistry> registry, StripBudgets budgets) {
  auto fn = oracle_checker.invoke;
  return make_checker("Stripped(" + oracle_checker.id + ")",
                      [fn, registry, budgets](InputAccess& input, const ProblemContext& ctx, const Vec& answer) {
                        const auto anchors = anchor_sets(ctx.family, ctx.dims);
                        const bool at1 = fn(input, ctx, answer, anchors.y1);
                        const bool at2 = fn(input, ctx, answer, anchors.y2);
                        if (at1 == at2) return at1;
                        return select_probe_branch(input, *registry, budgets) == 1 ? at1 : at2;
                      });
}

SolverPtr strip_oracle_solver(const OracleSolverHandle& oracle_solver, std::shared_ptr<const SubjectRegistry> registry,
                              StripBudgets budgets) {
  auto fn = oracle_solver.invoke;
  return make_solver("Stripped(" + oracle_solver.id + ")",
                     [fn, registry, budgets](InputAccess& input, const ProblemContext& ctx) {
                       const auto anchors = anchor_sets(ctx.family, ctx.dims);
                       Vec at1 = fn(input, ctx, anchors.y1);
                       Vec at2 = fn(input, ctx, anchors.y2);
                       if (at1 == at2) return at1;
                       return select_probe_branch(input, *registry, budgets) == 1 ? at1 : at2;
                     });
}

std::string recheck(const FailureCertificate& cert) {
  std::optional<ProblemInstance> inst;
  if (auto reason = check_truth(cert.family, cert.dims, cert.truth_params, cert.truth, inst); !reason.empty()) {
    return reason;
  }
  if (cert.answer.size() != cert.dims.n1) return "answer has the wrong length";
  if (cert.verdict != 1 && cert.verdict != 2) return "verdict must be 1 or 2";
  if (cert.fuel < 1) return "fuel must be positive";
  if (iota_anchor(cert.family, cert.dims, cert.verdict, cert.fuel).params() != cert.truth_params) {
    return "ground truth is not the anchor input selected by (verdict, fuel)";
  }
  const auto d = distance_to(cert.truth, cert.answer, cert.family.norm);
  if (d.norm() != cert.distance.norm() || d.powered() != cert.distance.powered()) {
    return "distance record does not match the recomputed distance";
  }
  if (!d.exceeds(cert.family.kappa)) return "answer is within kappa of the true solution set";
  const auto anchors = anchor_sets(cert.family, cert.dims);
  const bool near_y2 = dist_point(cert.answer, anchors.y2, cert.family.norm).within(cert.family.kappa);
  if (near_y2 != (cert.verdict == 1)) return "verdict does not match the answer region";
  return {};
}

std::string recheck(const ExitFlagCertificate& cert) {
  std::optional<ProblemInstance> inst;
  if (auto reason = check_truth(cert.family, cert.dims, cert.truth_params, cert.truth, inst); !reason.empty()) {
    return reason;
  }
  if (cert.answer.size() != cert.dims.n1) return "answer has the wrong length";
  const auto anchors = anchor_sets(cert.family, cert.dims);
  const auto range = dist_segment(cert.answer, anchors.s0.a, anchors.s0.b, cert.family.norm);
  if (range.powered() != cert.range_distance.powered()) return "range distance record does not match";
  if (range.exceeds(cert.alpha) != cert.range_violation) return "range-violation marker does not match";
  const auto d = distance_to(cert.truth, cert.answer, cert.family.norm);
  if (d.norm() != cert.distance.norm() || d.powered() != cert.distance.powered()) {
    return "distance record does not match the recomputed distance";
  }
  if (d.within(cert.family.kappa) != cert.true_flag) return "true exit flag does not match the distance";
  if (cert.verdict == 3) {
    if (cert.checker_output) return "verdict 3 requires checker output 0";
    if (cert.truth_params != InstanceParams{}) return "verdict 3 requires the degenerate input";
  } else if (cert.verdict == 1 || cert.verdict == 2) {
    if (!cert.checker_output) return "verdicts 1 and 2 require checker output 1";
    if (iota_anchor(cert.family, cert.dims, cert.verdict, cert.fuel).params() != cert.truth_params) {
      return "ground truth is not the anchor input selected by (verdict, fuel)";
    }
    const bool near_y2 = dist_point(cert.answer, anchors.y2, cert.family.norm).within(cert.family.kappa);
    if (near_y2 != (cert.verdict == 1)) return "verdict does not match the answer region";
  } else {
    return "verdict must be 1, 2 or 3";
  }
  if (cert.range_violation) return {};
  if (cert.checker_output == cert.true_flag) return "checker output equals the true exit flag";
  return {};
}

std::string reverify(const FailureCertificate& cert, const SubjectRegistry& registry) {
  if (auto reason = recheck(cert); !reason.empty()) return reason;
  try {
    const MarkovInput input(parse_descriptor(cert.descriptor, registry));
    const auto* g = std::get_if<DiagonalDescriptor>(&input.descriptor());
    if (!g || g->subject.mode != SubjectMode::Plain) return "descriptor is not a plain diagonal input";
    if (g->family != cert.family || g->dims != cert.dims) return "descriptor family or dimensions differ";
    if (g->subject.solver->identity.reference() != cert.solver_reference) return "descriptor names another solver";
    if (input.ground_truth().params() != cert.truth_params) return "recomputed ground truth differs";
    DirectAccess access(input);
    if (g->subject.solver->invoke(access, input.context()) != cert.answer) return "re-run answer differs";
  } catch (const Error& e) {
    return std::string("re-verification raised: ") + e.what();
  }
  return {};
}

std::string reverify(const ExitFlagCertificate& cert, const SubjectRegistry& registry) {
  if (auto reason = recheck(cert); !reason.empty()) return reason;
  try {
    const MarkovInput input(parse_descriptor(cert.descriptor, registry));
    const auto* g = std::get_if<DiagonalDescriptor>(&input.descriptor());
    if (!g || g->subject.mode != SubjectMode::ExitFlag) return "descriptor is not an exit-flag diagonal input";
    if (g->family != cert.family || g->dims != cert.dims) return "descriptor family or dimensions differ";
    if (g->subject.solver->identity.reference() != cert.solver_reference ||
        g->subject.checker->identity.reference() != cert.checker_reference) {
      return "descriptor names other subjects";
    }
    if (input.ground_truth().params() != cert.truth_params) return "recomputed ground truth differs";
    DirectAccess access(input);
    const Vec answer = g->subject.solver->invoke(access, input.context());
    if (answer != cert.answer) return "re-run answer differs";
    if (g->subject.checker->invoke(access, input.context(), answer) != cert.checker_output) {
      return "re-run checker output differs";
    }
    if (exit_flag_truth(g->subject.solver, input) != cert.true_flag) return "recomputed exit flag differs";
  } catch (const Error& e) {
    return std::string("re-verification raised: ") + e.what();
  }
  return {};
}

}  // namespace crp
