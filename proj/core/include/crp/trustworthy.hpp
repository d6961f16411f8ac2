#pragma once

// Abstention: the gamma_star routine, the single-valuedness indicator, the
// giving-up tower and the selective solvers built on them.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "crp/markov.hpp"

namespace crp {

/// Answer(v) or IDontKnow. `at` is the precision that triggered an Answer (0 if not tracked).
struct Verdict {
  std::optional<Vec> answer;
  std::uint64_t at = 0;

  static Verdict idk() { return {}; }
  static Verdict of(Vec v, std::uint64_t at = 0) { return {std::move(v), at}; }
  bool knows() const { return answer.has_value(); }
  /// "IDK" or the vector, e.g. "(2/5,0)".
  std::string str() const;
};

struct GammaStarAnswer {
  Vec answer;
  std::uint64_t n = 0;  // precision at which the branch fired
};

/// Scans n = 1..max_budget; nullopt is NotYet.
std::optional<GammaStarAnswer> gamma_star(const MarkovInput& input, std::uint64_t max_budget);

bool single_valued_indicator(const MarkovInput& input, std::uint64_t n);

Verdict tower_solve(const MarkovInput& input, std::uint64_t n);

using Indicator = std::function<bool(const MarkovInput&, std::uint64_t)>;
using PartialSolver = std::function<Vec(const MarkovInput&)>;
using Tower = std::function<Verdict(const MarkovInput&, std::uint64_t)>;

/// Gamma_n(input) = Answer(partial_solver(input)) when indicator(input, n) is 1,
/// IDontKnow otherwise. Each call also checks indicator(input, n-1) <= indicator(input, n).
Tower build_giving_up_ai(Indicator indicator, PartialSolver partial_solver);

/// Know / don't-know per input (keyed by descriptor text), as induced by a tower at level n.
class IdkRegistry {
 public:
  void record(const MarkovInput& input, bool knows);
  std::optional<bool> knows(const MarkovInput& input) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, bool>& entries() const { return entries_; }

 private:
  std::map<std::string, bool> entries_;
};

IdkRegistry induce_idk_registry(const Tower& tower, const std::vector<MarkovInput>& inputs, std::uint64_t n);

/// The registered representative phi0 answers y1; anything else goes through
/// gamma_star. nullopt is NotYet, never a wrong answer.
std::optional<Vec> selective_solver(const MarkovInput& input, const MarkovInput& phi0, std::uint64_t budget);

/// Defined on phi0 (answers the midpoint of y1, y2) and on Exact inputs with
/// u1 != u2 (compares phi_1(1) with phi_2(1)). Throws NotApplicable elsewhere.
Vec crp4_demo_solver(const MarkovInput& input, const MarkovInput& phi0);

}  // namespace crp
