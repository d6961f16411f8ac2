#include "crp/harness/commands.hpp"

#include <iomanip>
#include <ostream>

#include "crp/errors.hpp"
#include "crp/trustworthy.hpp"

namespace crp::harness {

namespace {

std::string truth_label(const InstanceParams& p) {
  if (p.u1 == p.u2) return "iota0";
  return "(" + p.u1.str() + "," + p.u2.str() + ")";
}

// Re-verifies before anything is written; a failure here is an engine defect.
void verify_or_throw(const Certificate& cert, const Subjects& subjects) {
  if (const auto* e = std::get_if<ExitFlagCertificate>(&cert)) subjects.ensure_derandomized(e->checker_id);
  if (auto why = recheck(cert); !why.empty()) throw EngineBugError("certificate re-check failed: " + why);
  if (auto why = reverify(cert, *subjects.registry); !why.empty()) {
    throw EngineBugError("certificate re-verification failed: " + why);
  }
}

std::string store_certificate(CommandContext& ctx, const Certificate& cert) {
  return ctx.store ? ctx.store->append(cert) : std::string("-");
}

void print_exitflag(std::ostream& out, const ExitFlagCertificate& c, const std::string& file) {
  out << "solver " << c.solver_id << "  checker " << c.checker_id << "  family " << to_string(c.family.kind)
      << "  N1=" << c.dims.n1 << " N2=" << c.dims.n2 << '\n'
      << "  checker_output " << (c.checker_output ? 1 : 0) << "  true_flag " << (c.true_flag ? 1 : 0)
      << "  verdict " << c.verdict << "  fuel " << c.fuel << '\n'
      << "  truth " << truth_label(c.truth_params) << "  answer " << format_vec(c.answer) << "  distance "
      << c.distance.describe() << '\n'
      << "  range " << (c.range_violation ? "VIOLATED" : "ok") << " (alpha " << c.alpha.str() << ", distance "
      << c.range_distance.describe() << ")  file " << file << '\n';
}

int finish_exitflag(CommandContext& ctx, const ExitFlagCertificate& cert) {
  verify_or_throw(cert, ctx.subjects);
  const auto file = store_certificate(ctx, cert);
  print_exitflag(ctx.out, cert, file);
  return cert.range_violation ? kRange : kOk;
}

}  // namespace

int run_guarded(const std::function<int()>& fn, std::ostream& err) {
  try {
    return fn();
  } catch (const ConfigurationError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const RegistryError& e) {
    err << "registry error: " << e.what() << '\n';
    return kConfig;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kConfig;
  } catch (const DimensionError& e) {
    err << "dimension error: " << e.what() << '\n';
    return kConfig;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kConfig;
  } catch (const UnsupportedNormError& e) {
    err << "unsupported norm: " << e.what() << '\n';
    return kConfig;
  } catch (const ProtocolError& e) {
    err << "protocol error: " << e.what() << '\n';
    return kProtocol;
  } catch (const EngineBugError& e) {
    err << "internal re-check failure: " << e.what() << '\n';
    return kRecheck;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

CommandContext make_context(HarnessConfig config, bool use_store, std::ostream& out) {
  auto subjects = build_subjects(config);
  std::optional<CertificateStore> store;
  if (use_store) store.emplace(config.store);
  return CommandContext{std::move(config), std::move(subjects), std::move(store), out};
}

InstanceParams sample_params(std::mt19937_64& rng, const Rational& theta) {
  const Rational half(1, 2);
  const auto shape = rng() % 3;
  if (shape == 0) return {half, half};
  const auto v = theta + (half - theta) * Rational(static_cast<long long>(rng() % 64), 64);
  return shape == 1 ? InstanceParams{v, half} : InstanceParams{half, v};
}

int cmd_attack(CommandContext& ctx, const std::string& solver_name, std::size_t count) {
  if (count == 0) throw ConfigurationError("count must be positive");
  const auto solver = ctx.subjects.registry->solver(solver_name);
  const auto& cfg = ctx.config;
  const auto report = batch_attack(solver, cfg.family, count, cfg.dims.n1, cfg.attack_options());
  for (const auto& cert : report.certificates) verify_or_throw(cert, ctx.subjects);
  if (!report.lengths_ok) throw EngineBugError("descriptor length exceeds the declared bound");

  auto& out = ctx.out;
  out << "solver " << solver->id() << "  family " << to_string(cfg.family.kind) << "  kappa " << cfg.family.kappa
      << "  declared size " << report.declared_size << "  engine constant " << report.engine_constant << '\n';
  out << std::left << std::setw(6) << "N1" << std::setw(8) << "fuel" << std::setw(9) << "verdict" << std::setw(12)
      << "distance" << std::setw(8) << "bytes" << std::setw(8) << "bound"
      << "file" << '\n';
  for (std::size_t k = 0; k < report.certificates.size(); ++k) {
    const auto& c = report.certificates[k];
    const auto file = store_certificate(ctx, c);
    out << std::setw(6) << c.dims.n1 << std::setw(8) << c.fuel << std::setw(9) << c.verdict << std::setw(12)
        << c.distance.describe() << std::setw(8) << report.lengths[k].bytes << std::setw(8) << report.lengths[k].bound
        << file << '\n';
  }
  return kOk;
}

int cmd_trustworthy(CommandContext& ctx, const std::string& descriptor_text, std::uint64_t budget) {
  const MarkovInput input(parse_descriptor(descriptor_text, *ctx.subjects.registry));
  const auto v = tower_solve(input, budget);
  if (v.knows()) {
    ctx.out << "Answer " << v.str() << " at n'=" << v.at << '\n';
  } else {
    ctx.out << "I don't know\n";
  }
  return kOk;
}

int cmd_verify_formulas(CommandContext& ctx, const std::vector<ProblemKind>& kinds, std::size_t samples,
                        const Rational& step) {
  if (step.sign() <= 0) throw ConfigurationError("grid step must be positive");
  bool ok = true;
  for (const auto kind : kinds) {
    const auto family = ctx.config.family_of(kind);
    std::mt19937_64 rng(ctx.config.seed);
    Rational max_gap;
    Rational max_bound;
    std::size_t failures = 0;
    for (std::size_t s = 0; s < samples; ++s) {
      const auto inst = build_instance(family, ctx.config.dims, sample_params(rng, family.theta));
      const auto best = optimal_value(inst);
      const auto set = solve_closed_form(inst);
      std::vector<Vec> points;
      if (const auto* p = std::get_if<PointSolution>(&set)) {
        points.push_back(p->point);
      } else {
        const auto& seg = std::get<SegmentSolution>(set);
        points = {seg.a, seg.b};
      }
      bool sample_ok = true;
      for (const auto& x : points) {
        const auto v = objective_value(inst, x);
        sample_ok = sample_ok && v.feasible && v.value == best;
      }
      const auto grid = brute_force_oracle(inst, step);
      const auto gap = grid.objective - best;
      const auto bound = grid_gap_bound(inst, step);
      sample_ok = sample_ok && gap.sign() >= 0 && gap <= bound;
      if (!sample_ok) ++failures;
      max_gap = max(max_gap, gap);
      max_bound = max(max_bound, bound);
    }
    ctx.out << std::left << std::setw(6) << to_string(kind) << " samples " << samples << "  step " << step
            << "  max gap " << max_gap << "  bound " << max_bound << "  " << (failures ? "FAIL" : "pass") << '\n';
    ok = ok && failures == 0;
  }
  return ok ? kOk : kRecheck;
}

int cmd_attack_exitflag(CommandContext& ctx, const std::string& solver, const std::string& checker) {
  const auto& reg = *ctx.subjects.registry;
  const auto cert = attack_checker(reg.solver(solver), reg.checker(checker), ctx.config.family, ctx.config.dims,
                                   ctx.config.attack_options());
  return finish_exitflag(ctx, cert);
}

int cmd_attack_random_checker(CommandContext& ctx, const std::string& solver, const std::string& randomized,
                              const Rational& p, bool y0) {
  const auto& rc = ctx.subjects.randomized_checker(randomized);
  DerandomizeOptions opts;
  opts.max_depth = ctx.config.max_depth;
  const auto checker = derandomized_checker(rc, bernoulli_premeasure(Rational(1, 2)), p, y0, opts);
  if (!ctx.subjects.registry->has_checker(checker->id())) ctx.subjects.registry->add(checker);
  ctx.out << "derandomized " << rc.id << " at p=" << p << " (n0=" << multi_valued_precision(p) << ") as "
          << checker->id() << '\n';
  const auto cert = attack_checker(ctx.subjects.registry->solver(solver), ctx.subjects.registry->checker(checker->id()),
                                   ctx.config.family, ctx.config.dims, ctx.config.attack_options());
  return finish_exitflag(ctx, cert);
}

int cmd_report(CommandContext& ctx, const std::filesystem::path& dir, bool csv) {
  if (!std::filesystem::exists(dir / "index.tsv")) throw ConfigurationError("no certificate store at " + dir.string());
  const CertificateStore store(dir);
  auto& out = ctx.out;
  const char sep = csv ? ',' : '\t';
  out << "file" << sep << "kind" << sep << "solver" << sep << "checker" << sep << "family" << sep << "N1" << sep
      << "fuel" << sep << "verdict" << sep << "distance" << sep << "status" << '\n';
  std::size_t failures = 0;
  for (const auto& [file, cert] : store.load()) {
    std::string status = "ok";
    try {
      if (const auto* e = std::get_if<ExitFlagCertificate>(&cert)) ctx.subjects.ensure_derandomized(e->checker_id);
      status = recheck(cert);
      if (status.empty()) status = reverify(cert, *ctx.subjects.registry);
      if (status.empty()) status = "ok";
    } catch (const std::exception& e) {
      status = e.what();
    }
    if (status != "ok") ++failures;
    std::visit(
        [&](const auto& c) {
          std::string checker = "-";
          if constexpr (std::is_same_v<std::decay_t<decltype(c)>, ExitFlagCertificate>) checker = c.checker_id;
          out << file << sep << certificate_kind(cert) << sep << c.solver_id << sep << checker << sep
              << to_string(c.family.kind) << sep << c.dims.n1 << sep << c.fuel << sep << c.verdict << sep
              << c.distance.describe() << sep << status << '\n';
        },
        cert);
  }
  if (!csv) out << "# " << store.size() << " certificates, " << failures << " failed re-verification\n";
  return failures ? kRecheck : kOk;
}

int cmd_engine_constant(CommandContext& ctx, const std::string& solver) {
  const DiagonalDescriptor d{ctx.config.family, ctx.config.dims,
                             SubjectRef{ctx.subjects.registry->solver(solver), nullptr, SubjectMode::Plain}};
  ctx.out << "engine constant " << engine_constant(d) << "  (solver bytes " << subject_bytes(d) << ", N1 digits "
          << decimal_digits(ctx.config.dims.n1) << ")\n";
  return kOk;
}

int cmd_make_input(CommandContext& ctx, const MakeInputArgs& a) {
  const auto& cfg = ctx.config;
  const auto& reg = *ctx.subjects.registry;
  std::optional<MarkovInput> input;
  if (a.kind == "exact") {
    input.emplace(make_exact(build_instance(cfg.family, cfg.dims, {a.u1, a.u2})));
  } else if (a.kind == "schedule") {
    input.emplace(make_schedule(cfg.family, cfg.dims, a.j, a.t));
  } else if (a.kind == "diagonal") {
    input.emplace(make_diagonal(cfg.family, cfg.dims, reg.solver(a.solver)));
  } else if (a.kind == "exitflag") {
    input.emplace(make_exitflag_diagonal(cfg.family, cfg.dims, reg.solver(a.solver), reg.checker(a.checker)));
  } else {
    throw ConfigurationError("unknown input kind '" + a.kind + "'");
  }
  ctx.out << input->text();
  return kOk;
}

}  // namespace crp::harness
