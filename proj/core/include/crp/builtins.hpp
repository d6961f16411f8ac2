#pragma once

// Built-in subjects: always-answering solvers and exit-flag checkers.

#include <cstdint>
#include <optional>

#include "crp/subject.hpp"

namespace crp {

/// First n in 1..budget at which |phi_1(n) - phi_2(n)| > 2 * 2^-n, with the branch
/// it selects (1 when the difference is positive). nullopt when the budget runs out.
struct GammaStarHit {
  int branch = 0;
  std::uint64_t n = 0;
};
std::optional<GammaStarHit> gamma_star_scan(InputAccess& input, std::uint64_t budget);

/// Zero queries, answers y1.
SolverPtr blind_solver();
/// Zero queries, answers y2.
SolverPtr always_y2_solver();
/// Queries phi_1(1); y1 if the value is at least 1/2, else y2.
SolverPtr one_query_solver();
/// d = phi_1(k) - phi_2(k); y1 if d > 2*2^-k, y2 if d < -2*2^-k, otherwise the midpoint.
SolverPtr snap_at_solver(std::uint64_t k);

CheckerPtr always_checker(bool value);
/// Runs the gamma_star scan with the given budget. On a hit, flags 1 iff the answer
/// is within kappa of the selected anchor; with no hit it flags 1.
CheckerPtr resolve_compare_checker(std::uint64_t budget = 10);

/// Solvers named in the acceptance suite, in a fixed order.
std::vector<SolverPtr> builtin_solvers();
std::vector<CheckerPtr> builtin_checkers();

/// A registry holding every built-in subject.
SubjectRegistry builtin_registry();

}  // namespace crp
