#include "crp/trustworthy.hpp"

#include "crp/builtins.hpp"
#include "crp/errors.hpp"

namespace crp {

std::string Verdict::str() const { return answer ? format_vec(*answer) : "IDK"; }

std::optional<GammaStarAnswer> gamma_star(const MarkovInput& input, std::uint64_t max_budget) {
  DirectAccess access(input);
  const auto hit = gamma_star_scan(access, max_budget);
  if (!hit) return std::nullopt;
  const auto anchors = anchor_sets(input.family(), input.dims());
  return GammaStarAnswer{hit->branch == 1 ? anchors.y1 : anchors.y2, hit->n};
}

bool single_valued_indicator(const MarkovInput& input, std::uint64_t n) {
  if (n < 1) throw DomainError("indicator level must be at least 1");
  return gamma_star(input, n).has_value();
}

Verdict tower_solve(const MarkovInput& input, std::uint64_t n) {
  if (n < 1) throw DomainError("tower level must be at least 1");
  // The indicator fires exactly when the scan up to n hits, and the hit carries the answer.
  auto hit = gamma_star(input, n);
  if (!hit) return Verdict::idk();
  return Verdict::of(std::move(hit->answer), hit->n);
}

Tower build_giving_up_ai(Indicator indicator, PartialSolver partial_solver) {
  return [indicator = std::move(indicator), partial_solver = std::move(partial_solver)](const MarkovInput& input,
                                                                                         std::uint64_t n) {
    if (n < 1) throw DomainError("tower level must be at least 1");
    const bool now = indicator(input, n);
    if (n > 1 && indicator(input, n - 1) && !now) {
      throw ContractError("indicator is not monotone at level " + std::to_string(n));
    }
    if (!now) return Verdict::idk();
    return Verdict::of(partial_solver(input), n);
  };
}

void IdkRegistry::record(const MarkovInput& input, bool knows) { entries_[input.text()] = knows; }

std::optional<bool> IdkRegistry::knows(const MarkovInput& input) const {
  const auto it = entries_.find(input.text());
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

IdkRegistry induce_idk_registry(const Tower& tower, const std::vector<MarkovInput>& inputs, std::uint64_t n) {
  IdkRegistry registry;
  for (const auto& input : inputs) registry.record(input, tower(input, n).knows());
  return registry;
}

std::optional<Vec> selective_solver(const MarkovInput& input, const MarkovInput& phi0, std::uint64_t budget) {
  if (input.text() == phi0.text()) return anchor_sets(input.family(), input.dims()).y1;
  auto hit = gamma_star(input, budget);
  if (!hit) return std::nullopt;
  return std::move(hit->answer);
}

Vec crp4_demo_solver(const MarkovInput& input, const MarkovInput& phi0) {
  const auto anchors = anchor_sets(input.family(), input.dims());
  if (input.text() == phi0.text()) return midpoint(anchors.y1, anchors.y2);
  const auto* e = std::get_if<ExactDescriptor>(&input.descriptor());
  if (!e || e->instance.params().u1 == e->instance.params().u2) {
    throw NotApplicable("input is neither the registered representative nor an exact input with u1 != u2");
  }
  return input.eval_coord(1, 1) > input.eval_coord(2, 1) ? anchors.y1 : anchors.y2;
}

}  // namespace crp
