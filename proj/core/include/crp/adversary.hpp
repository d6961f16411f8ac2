#pragma once

// Diagonal attacks on solvers and exit-flag checkers, exactly re-checkable
// certificates, and the combinators that remove an oracle probe.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crp/markov.hpp"

namespace crp {

struct FailureCertificate {
  std::string solver_id;
  std::string solver_reference;
  std::string descriptor;
  Family family;
  Dims dims;
  InstanceParams truth_params;  // the ground-truth instance iota
  SolutionSet truth;            // its solution set
  Vec answer;
  Distance distance;  // dist(answer, truth) as a power-compare record
  std::uint64_t fuel = 0;
  int verdict = 0;
};

struct ExitFlagCertificate {
  std::string solver_id;
  std::string solver_reference;
  std::string checker_id;
  std::string checker_reference;
  std::string descriptor;
  Family family;
  Dims dims;
  InstanceParams truth_params;
  SolutionSet truth;
  Vec answer;
  bool checker_output = false;
  bool true_flag = false;
  Distance distance;  // dist(answer, truth)
  std::uint64_t fuel = 0;
  int verdict = 0;
  /// Set when the solver answer is further than alpha from the anchor segment.
  bool range_violation = false;
  Rational alpha;
  Distance range_distance;  // dist(answer, S0)
};

struct AttackOptions {
  Rational alpha{1, 20};
  /// Diagnostics guard on uncapped runs; 0 disables it.
  std::uint64_t max_fuel = 0;
};

FailureCertificate attack_solver(const SolverPtr& solver, const Family& family, const Dims& dims,
                                 const AttackOptions& options = {});

struct LengthRow {
  std::size_t n1 = 0;
  std::size_t bytes = 0;
  std::size_t bound = 0;  // declared size + C + digits(N1)
};

struct BatchReport {
  std::vector<FailureCertificate> certificates;
  std::vector<LengthRow> lengths;
  std::size_t engine_constant = 0;
  std::size_t declared_size = 0;
  bool lengths_ok = true;
};

/// Attacks at N1 = base_n1 .. base_n1 + K - 1 with N2 = 1.
BatchReport batch_attack(const SolverPtr& solver, const Family& family, std::size_t count, std::size_t base_n1,
                         const AttackOptions& options = {});

/// 1 iff the solver's answer on the input is within kappa of the true solution set.
bool exit_flag_truth(const SolverPtr& solver, const MarkovInput& input);

ExitFlagCertificate attack_checker(const SolverPtr& solver, const CheckerPtr& checker, const Family& family,
                                   const Dims& dims, const AttackOptions& options = {});

/// Budgeted stand-in for the verdict of a diagonal input: 1 or 2, or nullopt (not yet).
std::optional<int> verdict_extractor(const MarkovInput& input, std::uint64_t budget);

struct OracleSolverHandle {
  std::string id;
  OracleSolverFn invoke;
};

struct OracleCheckerHandle {
  std::string id;
  OracleCheckerFn invoke;
};

struct StripBudgets {
  std::uint64_t extractor = std::uint64_t{1} << 20;  // fuel pool for verdict_extractor
  std::uint64_t scan = 256;                          // precision cap for the gamma_star scan
};

/// Picks the probe branch for an input whose two probe evaluations disagree:
/// verdict_extractor for diagonal inputs, the gamma_star scan otherwise.
/// Throws NotApplicable when neither settles within its budget.
int select_probe_branch(InputAccess& input, const SubjectRegistry& registry, const StripBudgets& budgets);

/// The program text of the input is parsed through the registry, so diagonal
/// inputs naming the returned subject resolve once it is registered there.
CheckerPtr strip_oracle_checker(const OracleCheckerHandle& oracle_checker,
                                std::shared_ptr<const SubjectRegistry> registry, StripBudgets budgets = {});
SolverPtr strip_oracle_solver(const OracleSolverHandle& oracle_solver, std::shared_ptr<const SubjectRegistry> registry,
                              StripBudgets budgets = {});

/// Re-checks a certificate from its embedded data using exact arithmetic only
/// (no engine, no subject). Returns an empty string on success, else the reason.
std::string recheck(const FailureCertificate& cert);
std::string recheck(const ExitFlagCertificate& cert);

/// Full re-verification: re-parses the descriptor, recomputes ground truth and
/// re-runs the subjects. Returns an empty string on success.
std::string reverify(const FailureCertificate& cert, const SubjectRegistry& registry);
std::string reverify(const ExitFlagCertificate& cert, const SubjectRegistry& registry);

}  // namespace crp
