// crp: attacks, trustworthy runs, formula checks and certificate reports.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "crp/errors.hpp"
#include "crp/harness/commands.hpp"

using namespace crp;
using namespace crp::harness;

namespace {

std::string read_text(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<ProblemKind> kinds_of(const std::string& which) {
  if (which == "all") return {ProblemKind::LP, ProblemKind::BP, ProblemKind::LASSO};
  return {parse_problem_kind(which)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diagonal attacks and trustworthy solvers on LP, basis pursuit and LASSO inputs"};
  app.require_subcommand(1);

  std::string config_path;
  std::string family;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::string store_dir;
  bool no_store = false;
  app.add_option("-c,--config", config_path, "key = value config file");
  app.add_option("--family", family, "LP, BP or LASSO (overrides the config)");
  app.add_option("--n1", n1, "N1 (overrides the config)");
  app.add_option("--n2", n2, "N2 (overrides the config)");
  app.add_option("--store", store_dir, "certificate directory (overrides the config)");
  app.add_flag("--no-store", no_store, "do not write certificates");

  std::string solver;
  std::string checker;
  std::size_t count = 1;
  auto* attack = app.add_subcommand("attack", "diagonal attack on a solver, K dimensions from N1 up");
  attack->add_option("solver", solver)->required();
  attack->add_option("-K,--count", count, "number of certificates");

  std::string input_path;
  std::uint64_t budget = 0;
  auto* trust = app.add_subcommand("trustworthy", "run the giving-up tower on a descriptor");
  trust->add_option("input", input_path, "descriptor file, or - for stdin")->required();
  trust->add_option("-n,--budget", budget, "tower level n")->required();

  std::size_t samples = 20;
  std::string step_text = "1/100";
  std::string which = "all";
  auto* verify = app.add_subcommand("verify-formulas", "closed forms against the grid oracle");
  verify->add_option("--samples", samples);
  verify->add_option("--step", step_text, "grid step as num/den");
  verify->add_option("--which", which, "LP, BP, LASSO or all");

  auto* exitflag = app.add_subcommand("attack-exitflag", "attack an exit-flag checker");
  exitflag->add_option("solver", solver)->required();
  exitflag->add_option("checker", checker)->required();

  std::string p_text = "3/4";
  int y0 = 1;
  auto* random = app.add_subcommand("attack-random-checker", "derandomize a randomized checker, then attack it");
  random->add_option("solver", solver)->required();
  random->add_option("checker", checker, "randomized checker name")->required();
  random->add_option("-p,--probability", p_text, "success probability bound, > 1/2");
  random->add_option("--y0", y0, "fallback flag")->check(CLI::Range(0, 1));

  bool csv = false;
  std::string report_dir;
  auto* report = app.add_subcommand("report", "re-verify every stored certificate");
  report->add_option("dir", report_dir, "store directory (default: the configured store)");
  report->add_flag("--csv", csv);

  MakeInputArgs make;
  std::string u1_text = "1/2";
  std::string u2_text = "1/2";
  auto* make_input = app.add_subcommand("make-input", "print a canonical descriptor");
  make_input->add_option("kind", make.kind, "exact, schedule, diagonal or exitflag")->required();
  make_input->add_option("--u1", u1_text);
  make_input->add_option("--u2", u2_text);
  make_input->add_option("-j", make.j);
  make_input->add_option("-t", make.t);
  make_input->add_option("--solver", make.solver);
  make_input->add_option("--checker", make.checker);

  auto* constant = app.add_subcommand("engine-constant", "descriptor overhead for a solver");
  constant->add_option("solver", solver)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfig;
  }

  return run_guarded(
      [&]() -> int {
        HarnessConfig cfg = config_path.empty() ? parse_config("") : load_config(config_path);
        if (!family.empty()) cfg.family = cfg.family_of(parse_problem_kind(family));
        if (n1) cfg.dims.n1 = n1;
        if (n2) cfg.dims.n2 = n2;
        if (!store_dir.empty()) cfg.store = store_dir;
        const bool writes = !no_store && (attack->parsed() || exitflag->parsed() || random->parsed());
        auto ctx = make_context(cfg, writes, std::cout);

        if (attack->parsed()) return cmd_attack(ctx, solver, count);
        if (trust->parsed()) return cmd_trustworthy(ctx, read_text(input_path), budget);
        if (verify->parsed()) return cmd_verify_formulas(ctx, kinds_of(which), samples, Rational::parse(step_text));
        if (exitflag->parsed()) return cmd_attack_exitflag(ctx, solver, checker);
        if (random->parsed()) return cmd_attack_random_checker(ctx, solver, checker, Rational::parse(p_text), y0 == 1);
        if (report->parsed()) return cmd_report(ctx, report_dir.empty() ? cfg.store : report_dir, csv);
        if (make_input->parsed()) {
          make.u1 = Rational::parse(u1_text);
          make.u2 = Rational::parse(u2_text);
          return cmd_make_input(ctx, make);
        }
        return cmd_engine_constant(ctx, solver);
      },
      std::cerr);
}
