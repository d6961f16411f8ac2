#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <fstream>
#include <sstream>

#include "crp/builtins.hpp"
#include "crp/errors.hpp"
#include "crp/harness/commands.hpp"

using namespace crp;
using namespace crp::harness;
namespace fs = std::filesystem;

namespace {

Rational q(long long n, long long d = 1) { return Rational(n, d); }

const std::string kSubject = CRP_SUBJECT_PATH;

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("crp_harness_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

HarnessConfig config_with(const std::string& extra = "") { return parse_config(extra); }

// Drops the fields that name the subject so in-process and external twins compare.
Json without_subject(Certificate cert) {
  auto j = certificate_json(cert);
  j.erase("solver_id");
  j.erase("solver_reference");
  j.erase("checker_id");
  j.erase("checker_reference");
  std::string kept;
  std::istringstream lines(j["descriptor"].get<std::string>());
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("solver=", 0) != 0 && line.rfind("checker=", 0) != 0) kept += line + "\n";
  }
  j["descriptor"] = kept;
  return j;
}

}  // namespace

TEST(Config, DefaultsAndOverrides) {
  const auto d = parse_config("");
  EXPECT_EQ(d.family, Family::lp());
  EXPECT_EQ(d.dims, Dims{});
  const auto c = parse_config("# comment\nfamily = LASSO\nlambda = 1/40\nN1 = 4 # trailing\nN2 = 2\nseed = 9\n");
  EXPECT_EQ(c.family.kind, ProblemKind::LASSO);
  EXPECT_EQ(c.family.lambda, q(1, 40));
  EXPECT_EQ(c.dims, (Dims{4, 2}));
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.family_of(ProblemKind::BP).eta, q(1, 20));
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_config("family = BP\neta = 3/20\n"), ConfigurationError);
  EXPECT_THROW(parse_config("kappa = 1/10\nkappa = 1/10\n"), ConfigurationError);
  EXPECT_THROW(parse_config("colour = blue\n"), ConfigurationError);
  EXPECT_THROW(parse_config("N1 = two\n"), ConfigurationError);
  EXPECT_THROW(parse_config("N1 = 2\nN2 = 2\n"), ConfigurationError);
  EXPECT_THROW(parse_config("solver.X.size = 400\n"), ConfigurationError);
  EXPECT_THROW(parse_config("just words\n"), ConfigurationError);
}

TEST(Config, ExternalSubjects) {
  const auto cfg = parse_config("solver.Ext = " + kSubject + " Blind\nchecker.ExtC = " + kSubject +
                                " Always1\nchecker.ExtC.size = 900\n");
  ASSERT_EQ(cfg.subjects.size(), 2u);
  const auto subjects = build_subjects(cfg);
  const auto ext = subjects.registry->solver("Ext");
  EXPECT_EQ(ext->identity.declared_size, auto_declared_size(kSubject + " Blind"));
  EXPECT_GE(ext->identity.declared_size, ext->identity.reference().size());
  EXPECT_EQ(subjects.registry->checker("ExtC")->identity.declared_size, 900u);
  EXPECT_THROW(external_solver("X", kSubject + " Blind", 10), ConfigurationError);
  EXPECT_THROW(build_subjects(parse_config("solver.Blind = " + kSubject + " Blind\n")), ConfigurationError);
}

TEST(Certificates, JsonRoundTripIsByteStable) {
  const auto registry = harness_registry();
  std::vector<Certificate> certs;
  for (const auto& f : {Family::lp(), Family::bp(), Family::lasso()}) {
    certs.emplace_back(attack_solver(one_query_solver(), f, Dims{3, 1}));
    certs.emplace_back(attack_checker(blind_solver(), always_checker(false), f, Dims{}));
  }
  for (const auto& c : certs) {
    const auto text = certificate_payload(c);
    const auto back = parse_certificate(text);
    EXPECT_EQ(certificate_payload(back), text);
    EXPECT_EQ(recheck(back), "");
    EXPECT_EQ(reverify(back, registry), "");
  }
}

TEST(Certificates, TamperingIsCaught) {
  const auto cert = attack_solver(blind_solver(), Family::lp(), Dims{});
  auto j = certificate_json(cert);
  j["answer"] = Json::array({"0/1", "2/5"});  // the true solution itself
  EXPECT_NE(recheck(certificate_from(j)), "");
  j = certificate_json(cert);
  j["answer"][0] = "4/10";
  EXPECT_THROW(certificate_from(j), ParseError);
  EXPECT_THROW(parse_certificate("{"), ParseError);
  EXPECT_THROW(parse_certificate("{\"kind\":\"failure\"}"), ParseError);
}

TEST(Store, AppendLoadAndIndex) {
  const auto dir = fresh_dir("store");
  CertificateStore store(dir);
  EXPECT_EQ(store.append(attack_solver(blind_solver(), Family::lp(), Dims{})), "cert-000001.json");
  EXPECT_EQ(store.append(attack_checker(blind_solver(), always_checker(true), Family::lp(), Dims{})),
            "cert-000002.json");
  EXPECT_EQ(slurp(dir / "index.tsv"),
            "cert-000001.json\tfailure\tBlind\t-\t2\ncert-000002.json\texitflag\tBlind\tAlways1\t2\n");
  const auto loaded = CertificateStore(dir).load();
  ASSERT_EQ(loaded.size(), 2u);
  const auto registry = harness_registry();
  for (const auto& s : loaded) EXPECT_EQ(reverify(s.certificate, registry), "");
}

TEST(Commands, AttackExamples) {
  std::ostringstream out;
  auto ctx = make_context(config_with(), false, out);
  EXPECT_EQ(cmd_attack(ctx, "Blind", 1), kOk);
  EXPECT_NE(out.str().find("2/5"), std::string::npos);

  std::ostringstream err;
  EXPECT_EQ(run_guarded([&] { return cmd_attack(ctx, "unknown-solver", 1); }, err), kConfig);
  EXPECT_NE(err.str().find("unknown solver"), std::string::npos);
}

TEST(Commands, BatchLengthsDifferOnlyInDimensionDigits) {
  const auto dir = fresh_dir("batch");
  std::ostringstream out;
  auto cfg = config_with();
  cfg.store = dir.string();
  auto ctx = make_context(cfg, true, out);
  ASSERT_EQ(cmd_attack(ctx, "Blind", 3), kOk);
  const auto stored = ctx.store->load();
  ASSERT_EQ(stored.size(), 3u);
  std::set<std::size_t> lengths;
  std::set<std::string> without_dims;
  for (const auto& s : stored) {
    const auto& c = std::get<FailureCertificate>(s.certificate);
    lengths.insert(c.descriptor.size() - decimal_digits(c.dims.n1));
    auto descriptor = c.descriptor;
    const auto n1 = "N1=" + std::to_string(c.dims.n1) + "\n";
    descriptor.erase(descriptor.find(n1), n1.size());
    without_dims.insert(descriptor);
  }
  EXPECT_EQ(without_dims.size(), 1u);
  EXPECT_EQ(lengths.size(), 1u);
}

TEST(Commands, Trustworthy) {
  std::ostringstream out;
  auto ctx = make_context(config_with(), false, out);
  const auto lp = Family::lp();
  cmd_trustworthy(ctx, make_schedule(lp, Dims{}, 1, 3).text(), 8);
  cmd_trustworthy(ctx, make_exact(iota_anchor(lp, Dims{}, 0, 0)).text(), 20);
  cmd_trustworthy(ctx, make_schedule(lp, Dims{}, 2, 1).text(), 4);
  EXPECT_EQ(out.str(), "Answer (2/5,0) at n'=8\nI don't know\nAnswer (0,2/5) at n'=4\n");
  std::ostringstream err;
  EXPECT_EQ(run_guarded([&] { return cmd_trustworthy(ctx, "not a descriptor", 4); }, err), kConfig);
}

TEST(Commands, VerifyFormulas) {
  std::ostringstream out;
  auto ctx = make_context(config_with(), false, out);
  EXPECT_EQ(cmd_verify_formulas(ctx, {ProblemKind::LP}, 20, q(1, 100)), kOk);
  EXPECT_EQ(cmd_verify_formulas(ctx, {ProblemKind::BP}, 20, q(1, 100)), kOk);
  EXPECT_NE(out.str().find("pass"), std::string::npos);
  EXPECT_EQ(out.str().find("FAIL"), std::string::npos);
}

TEST(Commands, ExitFlagExamples) {
  std::ostringstream out;
  auto ctx = make_context(config_with(), false, out);
  EXPECT_EQ(cmd_attack_exitflag(ctx, "Blind", "Always1"), kOk);
  EXPECT_NE(out.str().find("checker_output 1  true_flag 0"), std::string::npos);
  out.str("");
  EXPECT_EQ(cmd_attack_exitflag(ctx, "Blind", "Always0"), kOk);
  EXPECT_NE(out.str().find("checker_output 0  true_flag 1"), std::string::npos);
  EXPECT_NE(out.str().find("truth iota0"), std::string::npos);
  out.str("");
  EXPECT_EQ(cmd_attack_random_checker(ctx, "Blind", "Coin", q(3, 4), true), kOk);
  EXPECT_NE(out.str().find("Derand(Coin,3/4,1)"), std::string::npos);
  EXPECT_NE(out.str().find("checker_output 1  true_flag 0"), std::string::npos);
  std::ostringstream err;
  EXPECT_EQ(run_guarded([&] { return cmd_attack_random_checker(ctx, "Blind", "Coin", q(1, 2), true); }, err), kConfig);
}

TEST(Commands, RangeViolationHasItsOwnStatus) {
  std::ostringstream out;
  auto ctx = make_context(config_with(), false, out);
  const auto origin = make_solver("Origin", [](InputAccess&, const ProblemContext& c) { return Vec(c.dims.n1); });
  ctx.subjects.registry->add(origin);
  EXPECT_EQ(cmd_attack_exitflag(ctx, "Origin", "Always1"), kRange);
  EXPECT_NE(out.str().find("VIOLATED"), std::string::npos);
}

TEST(Commands, ReportReverifiesAndFlagsTampering) {
  const auto dir = fresh_dir("report");
  auto cfg = config_with();
  cfg.store = dir.string();
  std::ostringstream out;
  auto ctx = make_context(cfg, true, out);
  cmd_attack(ctx, "OneQuery", 2);
  cmd_attack_exitflag(ctx, "Blind", "ResolveCompare");
  cmd_attack_random_checker(ctx, "AlwaysY2", "Coin", q(3, 4), true);
  out.str("");
  EXPECT_EQ(cmd_report(ctx, dir, true), kOk);
  const auto csv = out.str();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);

  auto text = slurp(dir / "cert-000001.json");
  const auto pos = text.find("\"fuel\": 3");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 9, "\"fuel\": 4");
  std::ofstream(dir / "cert-000001.json", std::ios::binary) << text;
  out.str("");
  EXPECT_EQ(cmd_report(ctx, dir, false), kRecheck);
  EXPECT_NE(out.str().find("1 failed"), std::string::npos);
}

TEST(Commands, RepeatedRunsWriteIdenticalPayloads) {
  std::vector<std::string> runs;
  for (int r = 0; r < 2; ++r) {
    const auto dir = fresh_dir("determinism" + std::to_string(r));
    auto cfg = config_with();
    cfg.store = dir.string();
    std::ostringstream out;
    auto ctx = make_context(cfg, true, out);
    cmd_attack(ctx, "SnapAt4", 3);
    cmd_attack_exitflag(ctx, "OneQuery", "ResolveCompare");
    std::string all;
    for (const auto& e : fs::directory_iterator(dir)) all += e.path().filename().string();
    for (std::size_t i = 1; i <= 4; ++i) all += slurp(dir / ("cert-00000" + std::to_string(i) + ".json"));
    runs.push_back(all + slurp(dir / "index.tsv"));
  }
  EXPECT_EQ(runs[0], runs[1]);
}

TEST(Protocol, BuiltinSolversMatchTheirExternalTwins) {
  const auto registry = harness_registry();
  for (const auto& s : builtin_solvers()) {
    const auto ext = external_solver("Ext" + s->id(), kSubject + " " + s->id(), 400);
    for (const auto& f : {Family::lp(), Family::lasso()}) {
      const auto a = attack_solver(s, f, Dims{});
      const auto b = attack_solver(ext, f, Dims{});
      EXPECT_EQ(without_subject(a), without_subject(b)) << s->id();
      EXPECT_EQ(reverify(Certificate(b), registry), "") << s->id();
    }
  }
}

TEST(Protocol, ExternalCheckersMatchTheirTwins) {
  const auto registry = harness_registry();
  for (const auto& c : builtin_checkers()) {
    const auto ext = external_checker("Ext" + c->id(), kSubject + " " + c->id(), 400);
    const auto a = attack_checker(blind_solver(), c, Family::lp(), Dims{});
    const auto b = attack_checker(blind_solver(), ext, Family::lp(), Dims{});
    EXPECT_EQ(without_subject(a), without_subject(b)) << c->id();
    EXPECT_EQ(reverify(Certificate(b), registry), "") << c->id();
  }
}

TEST(Protocol, ExternalRandomizedCheckerDerandomizesLikeTheBuiltin) {
  const auto fair = bernoulli_premeasure(q(1, 2));
  const auto ext = derandomized_checker(external_randomized_checker("ExtCoin", kSubject + " Coin"), fair, q(3, 4), true);
  const auto in = derandomized_checker(coin_checker(), fair, q(3, 4), true);
  const auto a = attack_checker(one_query_solver(), in, Family::lp(), Dims{});
  const auto b = attack_checker(one_query_solver(), ext, Family::lp(), Dims{});
  EXPECT_EQ(without_subject(a), without_subject(b));
}

TEST(Protocol, MisbehavingSubjects) {
  for (const auto* name : {"BadRational", "BadCoord", "Garbage"}) {
    const auto ext = external_solver(name, kSubject + " " + name, 400);
    EXPECT_THROW(attack_solver(ext, Family::lp(), Dims{}), ProtocolError) << name;
  }
  const auto silent = external_solver("Silent", kSubject + " Silent", 400, ProtocolOptions{std::chrono::milliseconds(300)});
  EXPECT_THROW(attack_solver(silent, Family::lp(), Dims{}), ProtocolError);
  const auto missing = external_solver("Missing", "/nonexistent/subject", 400);
  EXPECT_THROW(attack_solver(missing, Family::lp(), Dims{}), ProtocolError);
}

TEST(Protocol, ExternalReferencesResolveFromDescriptors) {
  const auto registry = harness_registry();
  const auto ext = external_solver("Ext", kSubject + " OneQuery", 400);
  const auto input = make_diagonal(Family::lp(), Dims{}, ext);
  const MarkovInput parsed(parse_descriptor(input.text(), registry));
  EXPECT_EQ(parsed.text(), input.text());
  EXPECT_EQ(parsed.ground_truth(), input.ground_truth());
}
