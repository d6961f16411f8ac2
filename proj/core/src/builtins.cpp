#include "crp/builtins.hpp"

namespace crp {

std::optional<GammaStarHit> gamma_star_scan(InputAccess& input, std::uint64_t budget) {
  for (std::uint64_t n = 1; n <= budget; ++n) {
    const Rational delta = input.query(1, n) - input.query(2, n);
    const Rational gap = Rational(2) * dyadic(n);
    if (delta > gap) return GammaStarHit{1, n};
    if (delta < -gap) return GammaStarHit{2, n};
  }
  return std::nullopt;
}

SolverPtr blind_solver() {
  return make_solver("Blind", [](InputAccess&, const ProblemContext& ctx) { return anchor_sets(ctx.family, ctx.dims).y1; });
}

SolverPtr always_y2_solver() {
  return make_solver("AlwaysY2",
                     [](InputAccess&, const ProblemContext& ctx) { return anchor_sets(ctx.family, ctx.dims).y2; });
}

SolverPtr one_query_solver() {
  return make_solver("OneQuery", [](InputAccess& input, const ProblemContext& ctx) {
    const auto anchors = anchor_sets(ctx.family, ctx.dims);
    return input.query(1, 1) >= Rational(1, 2) ? anchors.y1 : anchors.y2;
  });
}

SolverPtr snap_at_solver(std::uint64_t k) {
  return make_solver("SnapAt" + std::to_string(k), [k](InputAccess& input, const ProblemContext& ctx) {
    const auto anchors = anchor_sets(ctx.family, ctx.dims);
    const Rational delta = input.query(1, k) - input.query(2, k);
    const Rational gap = Rational(2) * dyadic(k);
    if (delta > gap) return anchors.y1;
    if (delta < -gap) return anchors.y2;
    return midpoint(anchors.y1, anchors.y2);
  });
}

CheckerPtr always_checker(bool value) {
  return make_checker(value ? "Always1" : "Always0",
                      [value](InputAccess&, const ProblemContext&, const Vec&) { return value; });
}

CheckerPtr resolve_compare_checker(std::uint64_t budget) {
  const std::string id = budget == 10 ? "ResolveCompare" : "ResolveCompare" + std::to_string(budget);
  return make_checker(id, [budget](InputAccess& input, const ProblemContext& ctx, const Vec& answer) {
    const auto hit = gamma_star_scan(input, budget);
    if (!hit) return true;
    const auto anchors = anchor_sets(ctx.family, ctx.dims);
    const auto& target = hit->branch == 1 ? anchors.y1 : anchors.y2;
    return dist_point(answer, target, ctx.family.norm).within(ctx.family.kappa);
  });
}

std::vector<SolverPtr> builtin_solvers() {
  return {blind_solver(), always_y2_solver(), one_query_solver(), snap_at_solver(4), snap_at_solver(8)};
}

std::vector<CheckerPtr> builtin_checkers() {
  return {always_checker(true), always_checker(false), resolve_compare_checker()};
}

SubjectRegistry builtin_registry() {
  SubjectRegistry registry;
  for (auto& s : builtin_solvers()) registry.add(std::move(s));
  for (auto& c : builtin_checkers()) registry.add(std::move(c));
  return registry;
}

}  // namespace crp
