#include <gtest/gtest.h>

#include "crp/adversary.hpp"
#include "crp/builtins.hpp"
#include "crp/errors.hpp"
#include "crp/randomized.hpp"

using namespace crp;

namespace {

Rational q(long long n, long long d = 1) { return Rational(n, d); }

// Independent mass: sum over strings of prod_i (bit ? p : 1-p), computed bit by bit.
Rational oracle_mass(const std::vector<Bits>& strings, const Rational& p) {
  Rational total;
  for (const auto& s : strings) {
    Rational m(1);
    for (char c : s) m *= (c == '1') ? p : Rational(1) - p;
    total += m;
  }
  return total;
}

std::vector<Bits> strings_of(std::size_t t) {
  std::vector<Bits> out{""};
  for (std::size_t i = 0; i < t; ++i) {
    std::vector<Bits> next;
    for (const auto& s : out) {
      next.push_back(s + "0");
      next.push_back(s + "1");
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

TEST(PreMeasure, BernoulliExamples) {
  EXPECT_EQ(bernoulli_premeasure(q(1, 2)).approx("010", 5), q(1, 8));
  EXPECT_EQ(bernoulli_premeasure(q(1, 2)).approx("", 5), q(1));
  EXPECT_EQ(bernoulli_premeasure(q(2, 3)).approx("10", 5), q(2, 9));
  EXPECT_THROW(bernoulli_premeasure(q(3, 2)), DomainError);
  EXPECT_THROW(bernoulli_premeasure(q(-1, 2)), DomainError);
  EXPECT_THROW(bernoulli_premeasure(q(1, 2)).approx("01x", 1), DomainError);
}

TEST(PreMeasure, AdditivityAndOracleAgreement) {
  for (const auto& p : {q(1, 2), q(2, 3), q(1, 7), q(0), q(1)}) {
    const auto pm = bernoulli_premeasure(p);
    for (std::size_t t = 0; t <= 5; ++t) {
      for (const auto& s : strings_of(t)) {
        EXPECT_TRUE(check_additivity(pm, s, 8)) << s;
        EXPECT_EQ(pm.approx(s, 8), oracle_mass({s}, p));
      }
    }
  }
}

TEST(PreMeasure, ApproximateMeasureTolerance) {
  // Truncates the fair-coin mass to a multiple of 2^-(n+2): within 2^-n of the truth.
  const PreMeasure rough("rough",
                         [](std::string_view s, std::uint64_t n) -> Rational {
                           const auto exact = dyadic(s.size());
                           const auto grid = dyadic(n + 2);
                           const auto ratio = exact / grid;
                           const BigInt steps = ratio.numerator() / ratio.denominator();
                           return Rational(steps, BigInt(1)) * grid;
                         },
                         false);
  for (const auto& s : strings_of(4)) EXPECT_TRUE(check_additivity(rough, s, 6));
}

TEST(Cylinder, MassExamples) {
  const auto fair = bernoulli_premeasure(q(1, 2));
  EXPECT_EQ(cylinder_mass(fair, {"00", "01", "10"}, 4), q(3, 4));
  EXPECT_EQ(cylinder_mass(fair, {"0", "1"}, 4), q(1));
  EXPECT_EQ(cylinder_mass(fair, {}, 4), q(0));
  EXPECT_THROW(cylinder_mass(fair, {"0", "10"}, 4), DomainError);
  EXPECT_THROW(cylinder_mass(fair, {"01", "01"}, 4), DomainError);
}

TEST(Ptm, OrMachineExamples) {
  const auto ptm = or_ptm();
  EXPECT_EQ(run_ptm(ptm, 1, "0"), PtmOutput("1"));
  EXPECT_EQ(run_ptm(ptm, 1, "11"), PtmOutput("0"));
  EXPECT_EQ(run_ptm(ptm, 0, "10"), PtmOutput("0"));
  EXPECT_EQ(run_ptm(ptm, 1, ""), std::nullopt);
  EXPECT_EQ(run_ptm(ptm, 1, "1"), std::nullopt);
  EXPECT_EQ(run_ptm(ptm, 0, "0111"), PtmOutput("0"));
}

TEST(Ptm, PrefixConsistencyViolation) {
  const Ptm<int> flaky{"Flaky",
                       [](const int&, std::string_view bits) -> std::optional<PtmOutput> {
                         if (bits.empty()) return std::nullopt;
                         return PtmOutput(bits.size() == 1 ? "a" : "b");
                       },
                       false};
  EXPECT_EQ(run_ptm(flaky, 0, "1"), PtmOutput("a"));
  EXPECT_THROW(run_ptm(flaky, 0, "10"), ContractError);
}

TEST(Ptm, CylindersAreMonotone) {
  for (int g : {0, 1}) {
    const auto program = or_ptm().bind(g);
    for (const std::string y : {"0", "1"}) {
      for (std::uint64_t t = 1; t < 6; ++t) {
        const auto now = cylinder_set(program, y, t);
        const auto next = cylinder_set(program, y, t + 1);
        for (const auto& s : now) {
          for (const char b : {'0', '1'}) {
            EXPECT_NE(std::find(next.begin(), next.end(), s + b), next.end()) << s << b;
          }
        }
        EXPECT_LE(oracle_mass(now, q(1, 2)), oracle_mass(next, q(1, 2)));
      }
    }
  }
}

TEST(Derandomize, SingleValuedOrMachine) {
  const auto fair = bernoulli_premeasure(q(1, 2));
  for (int g : {0, 1}) {
    const auto r = derandomize_single_valued(or_ptm().bind(g), fair);
    EXPECT_EQ(r.value, std::to_string(g));
    EXPECT_EQ(r.depth, 3u);
    // The threshold must fail at depth 2 and hold at depth 3 under the oracle.
    const auto program = or_ptm().bind(g);
    EXPECT_FALSE(oracle_mass(cylinder_set(program, r.value, 2), q(1, 2)) > q(1, 2) + dyadic(2));
    EXPECT_TRUE(oracle_mass(cylinder_set(program, r.value, 3), q(1, 2)) > q(1, 2) + dyadic(3));
  }
}

TEST(Derandomize, SingleValuedConstant) {
  const auto r = derandomize_single_valued(constant_ptm("7").bind(0), bernoulli_premeasure(q(1, 2)));
  EXPECT_EQ(r.value, "7");
  EXPECT_EQ(r.depth, 2u);
}

TEST(Derandomize, SingleValuedHalfProbabilityNeverSettles) {
  DerandomizeOptions opts;
  opts.max_depth = 12;
  EXPECT_THROW(derandomize_single_valued(split_ptm().bind(0), bernoulli_premeasure(q(1, 2)), opts), BudgetExhausted);
}

TEST(Derandomize, MultiValuedPrecision) {
  EXPECT_EQ(multi_valued_precision(q(3, 4)), 3u);
  EXPECT_EQ(multi_valued_precision(q(1)), 2u);
  EXPECT_EQ(multi_valued_precision(q(5, 8)), 4u);
  EXPECT_THROW(multi_valued_precision(q(1, 2)), DomainError);
}

TEST(Derandomize, MultiValuedExamples) {
  const auto fair = bernoulli_premeasure(q(1, 2));
  const auto r = derandomize_multi_valued(or_ptm().bind(1), fair, q(3, 4), "y0");
  EXPECT_EQ(r.value, "1");
  EXPECT_EQ(r.depth, 2u);
  EXPECT_FALSE(r.fallback);

  const auto split = derandomize_multi_valued(split_ptm().bind(0), fair, q(3, 4), "y0");
  EXPECT_EQ(split.value, "y0");
  EXPECT_EQ(split.depth, 1u);
  EXPECT_TRUE(split.fallback);
}

TEST(Derandomize, CoinCheckerPipeline) {
  const auto fair = bernoulli_premeasure(q(1, 2));
  const auto checker = derandomized_checker(coin_checker(), fair, q(3, 4), true);
  EXPECT_EQ(checker->id(), "Derand(Coin,3/4,1)");
  const auto name = parse_derandomized_id(checker->id());
  ASSERT_TRUE(name.has_value());
  EXPECT_EQ(name->checker_id, "Coin");
  EXPECT_EQ(name->p, q(3, 4));
  EXPECT_TRUE(name->y0);
  EXPECT_FALSE(parse_derandomized_id("Derand(Coin)").has_value());

  // The derandomized checker is the constant 1 on every input it sees.
  const auto input = make_schedule(Family::lp(), Dims{}, 1, 3);
  DirectAccess access(input);
  const ProblemContext ctx{Family::lp(), Dims{}};
  EXPECT_TRUE(checker->invoke(access, ctx, Vec{q(0), q(0)}));

  auto registry = builtin_registry();
  registry.add(checker);
  for (const auto& s : builtin_solvers()) {
    const auto cert = attack_checker(s, checker, Family::lp(), Dims{});
    EXPECT_TRUE(cert.checker_output);
    EXPECT_FALSE(cert.true_flag) << s->id();
    EXPECT_EQ(reverify(cert, registry), "") << s->id();
  }
}
