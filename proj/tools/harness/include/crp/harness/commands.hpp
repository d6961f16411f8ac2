#pragma once

// The crp subcommands as plain functions: they print to `out` and return the
// process exit status. Exceptions map to statuses through run_guarded.

#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "crp/harness/config.hpp"
#include "crp/harness/store.hpp"

namespace crp::harness {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,  // subject contract breaches and anything unexpected
  kConfig = 2,   // configuration, registry and parse errors
  kProtocol = 3,
  kRecheck = 4,  // an internal re-check failed: an engine defect
  kRange = 5,    // the solver left the alpha-range; certificate still written
};

/// Runs fn, mapping crp errors to exit codes and printing the message to err.
int run_guarded(const std::function<int()>& fn, std::ostream& err);

struct CommandContext {
  HarnessConfig config;
  Subjects subjects;
  /// Certificates go here when set.
  std::optional<CertificateStore> store;
  std::ostream& out;
};

CommandContext make_context(HarnessConfig config, bool use_store, std::ostream& out);

/// Uniform draw from L_theta: both 1/2, or one coordinate on a 1/64 grid of [theta, 1/2).
InstanceParams sample_params(std::mt19937_64& rng, const Rational& theta);

int cmd_attack(CommandContext& ctx, const std::string& solver, std::size_t count);
int cmd_trustworthy(CommandContext& ctx, const std::string& descriptor_text, std::uint64_t budget);
int cmd_verify_formulas(CommandContext& ctx, const std::vector<ProblemKind>& kinds, std::size_t samples,
                        const Rational& step);
int cmd_attack_exitflag(CommandContext& ctx, const std::string& solver, const std::string& checker);
int cmd_attack_random_checker(CommandContext& ctx, const std::string& solver, const std::string& randomized,
                              const Rational& p, bool y0);
int cmd_report(CommandContext& ctx, const std::filesystem::path& dir, bool csv);
int cmd_engine_constant(CommandContext& ctx, const std::string& solver);

struct MakeInputArgs {
  std::string kind = "exact";  // exact, schedule, diagonal, exitflag
  Rational u1{1, 2};
  Rational u2{1, 2};
  int j = 1;
  std::uint64_t t = 1;
  std::string solver;
  std::string checker;
};
int cmd_make_input(CommandContext& ctx, const MakeInputArgs& args);

}  // namespace crp::harness
