#include <gtest/gtest.h>

#include <random>

#include "crp/builtins.hpp"
#include "crp/errors.hpp"
#include "crp/trustworthy.hpp"

using namespace crp;

namespace {

Rational q(long long n, long long d = 1) { return Rational(n, d); }

const Vec kY1{q(2, 5), q(0)};
const Vec kY2{q(0), q(2, 5)};

MarkovInput exact0() { return make_exact(build_instance(Family::lp(), Dims{}, {})); }

// Generated inputs: Exact with random L_theta parameters, Schedule with j,t <= 12,
// and Diagonal inputs over the built-in solvers.
std::vector<MarkovInput> generated_inputs(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<Family> families{Family::lp(), Family::bp(), Family::lasso()};
  const auto solvers = builtin_solvers();
  std::vector<MarkovInput> out;
  while (out.size() < count) {
    const auto& f = families[rng() % families.size()];
    const std::size_t n2 = 1 + rng() % 2;
    const Dims d{n2 + 1 + rng() % 3, n2};
    switch (rng() % 3) {
      case 0: {
        const Rational u = q(1, 4) + q(static_cast<long long>(rng() % 65), 256);
        InstanceParams p = (rng() % 2) ? InstanceParams{u, q(1, 2)} : InstanceParams{q(1, 2), u};
        out.push_back(make_exact(build_instance(f, d, p)));
        break;
      }
      case 1:
        out.push_back(make_schedule(f, d, 1 + static_cast<int>(rng() % 2), 1 + rng() % 12));
        break;
      default:
        out.push_back(make_diagonal(f, d, solvers[rng() % solvers.size()]));
        break;
    }
  }
  return out;
}

}  // namespace

TEST(GammaStar, Examples) {
  const auto s = make_schedule(Family::lp(), Dims{}, 1, 3);
  const auto hit = gamma_star(s, 8);
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->answer, kY1);
  EXPECT_EQ(hit->n, 8u);
  EXPECT_FALSE(gamma_star(s, 7));
  EXPECT_FALSE(gamma_star(exact0(), 40));
}

TEST(Indicator, Examples) {
  const auto s = make_schedule(Family::lp(), Dims{}, 1, 3);
  EXPECT_FALSE(single_valued_indicator(s, 7));
  EXPECT_TRUE(single_valued_indicator(s, 8));
  EXPECT_FALSE(single_valued_indicator(exact0(), 30));
}

TEST(TowerSolve, Examples) {
  const auto s = make_schedule(Family::lp(), Dims{}, 1, 3);
  EXPECT_FALSE(tower_solve(s, 7).knows());
  const auto v = tower_solve(s, 8);
  ASSERT_TRUE(v.knows());
  EXPECT_EQ(*v.answer, kY1);
  EXPECT_EQ(v.at, 8u);
  EXPECT_EQ(tower_solve(exact0(), 60).str(), "IDK");
  const auto s2 = tower_solve(make_schedule(Family::lp(), Dims{}, 2, 1), 4);
  EXPECT_EQ(s2.str(), "(0,2/5)");
  EXPECT_EQ(s2.at, 4u);
}

TEST(TowerSolve, CompletenessThresholdOnSchedules) {
  for (const auto& f : {Family::lp(), Family::bp(), Family::lasso()}) {
    for (int j : {1, 2}) {
      for (std::uint64_t t = 1; t <= 12; ++t) {
        const auto input = make_schedule(f, Dims{3, 1}, j, t);
        const auto anchors = anchor_sets(f, Dims{3, 1});
        const std::uint64_t threshold = 2 * t + 2;
        for (std::uint64_t n = 1; n <= threshold + 5; ++n) {
          const auto v = tower_solve(input, n);
          EXPECT_EQ(v.knows(), n >= threshold) << "j=" << j << " t=" << t << " n=" << n;
          if (v.knows()) EXPECT_EQ(*v.answer, j == 1 ? anchors.y1 : anchors.y2);
        }
      }
    }
  }
}

TEST(TowerSolve, NeverWrongAndMonotoneOnGeneratedInputs) {
  const auto inputs = generated_inputs(1000, 31);
  std::size_t answered = 0;
  for (const auto& input : inputs) {
    const auto truth = solve_closed_form(input.ground_truth());
    bool seen_answer = false;
    for (std::uint64_t n : {1u, 3u, 6u, 10u, 16u, 26u, 30u}) {
      const auto v = tower_solve(input, n);
      if (seen_answer) EXPECT_TRUE(v.knows()) << input.text() << " n=" << n;
      if (!v.knows()) continue;
      seen_answer = true;
      ++answered;
      EXPECT_TRUE(distance_to(truth, *v.answer, input.family().norm).within(q(0))) << input.text();
      for (std::uint64_t m = n + 1; m <= n + 5; ++m) EXPECT_EQ(tower_solve(input, m).answer, v.answer);
    }
  }
  EXPECT_GT(answered, 0u);
}

TEST(TowerSolve, AbstainsOnDegenerateInputs) {
  std::vector<MarkovInput> degenerate{exact0(), make_exact(build_instance(Family::bp(), Dims{4, 2}, {}))};
  for (const auto& c : builtin_checkers()) {
    const auto input = make_exitflag_diagonal(Family::lp(), Dims{}, blind_solver(), c);
    if (input.ground_truth().params() == InstanceParams{}) degenerate.push_back(input);
  }
  ASSERT_GE(degenerate.size(), 3u);
  for (const auto& input : degenerate) {
    for (std::uint64_t n = 1; n <= 40; ++n) EXPECT_FALSE(tower_solve(input, n).knows()) << input.text();
  }
}

TEST(IdkRegistry, MatchesSingleValuednessOfGroundTruth) {
  const auto inputs = generated_inputs(200, 41);
  const Tower tower = [](const MarkovInput& in, std::uint64_t n) { return tower_solve(in, n); };
  // Schedules have t <= 12 and diagonal fuel stays small, so level 64 is past every threshold.
  const auto registry = induce_idk_registry(tower, inputs, 64);
  EXPECT_LE(registry.size(), inputs.size());
  for (const auto& input : inputs) {
    const auto p = input.ground_truth().params();
    EXPECT_EQ(registry.knows(input), p.u1 != p.u2) << input.text();
  }
}

TEST(GivingUpAi, Composition) {
  const auto via_builder = build_giving_up_ai(single_valued_indicator,
                                              [](const MarkovInput& in) { return gamma_star(in, 1 << 12)->answer; });
  const auto inputs = generated_inputs(60, 53);
  for (const auto& input : inputs) {
    for (std::uint64_t n : {1u, 5u, 12u, 30u}) EXPECT_EQ(via_builder(input, n).answer, tower_solve(input, n).answer);
  }
  const auto never = build_giving_up_ai([](const MarkovInput&, std::uint64_t) { return false; },
                                        [](const MarkovInput&) -> Vec { throw std::logic_error("unreachable"); });
  for (const auto& input : inputs) EXPECT_FALSE(never(input, 7).knows());

  const auto closed = build_giving_up_ai([](const MarkovInput&, std::uint64_t) { return true; },
                                         [](const MarkovInput& in) {
                                           const auto s = solve_closed_form(in.ground_truth());
                                           return std::get<PointSolution>(s).point;
                                         });
  const auto e = make_exact(build_instance(Family::lp(), Dims{}, {q(1, 2), q(1, 4)}));
  for (std::uint64_t n = 1; n <= 5; ++n) EXPECT_EQ(*closed(e, n).answer, kY1);

  const auto flicker = build_giving_up_ai([](const MarkovInput&, std::uint64_t n) { return n == 3; },
                                          [](const MarkovInput&) { return kY1; });
  EXPECT_TRUE(flicker(e, 3).knows());
  EXPECT_THROW(flicker(e, 4), ContractError);
}

TEST(SelectiveSolver, Examples) {
  const auto phi0 = exact0();
  EXPECT_EQ(selective_solver(phi0, phi0, 1), kY1);
  EXPECT_EQ(selective_solver(make_schedule(Family::lp(), Dims{}, 2, 1), phi0, 8), kY2);
  // Same ground truth as phi0 but a different program.
  const auto other = make_exitflag_diagonal(Family::lp(), Dims{}, blind_solver(), always_checker(false));
  ASSERT_EQ(other.ground_truth(), phi0.ground_truth());
  EXPECT_EQ(selective_solver(other, phi0, 50), std::nullopt);
}

TEST(Crp4Demo, Examples) {
  const auto phi0 = exact0();
  EXPECT_EQ(crp4_demo_solver(phi0, phi0), (Vec{q(1, 5), q(1, 5)}));
  EXPECT_EQ(crp4_demo_solver(make_exact(build_instance(Family::lp(), Dims{}, {q(1, 2), q(1, 4)})), phi0), kY1);
  EXPECT_EQ(crp4_demo_solver(make_exact(build_instance(Family::lp(), Dims{}, {q(1, 4), q(1, 2)})), phi0), kY2);
  EXPECT_THROW(crp4_demo_solver(make_schedule(Family::lp(), Dims{}, 1, 2), phi0), NotApplicable);
}
