#include <gtest/gtest.h>

#include <random>

#include "crp/errors.hpp"
#include "crp/exactnum.hpp"

using namespace crp;

namespace {

Rational q(long long n, long long d = 1) { return Rational(n, d); }

Vec random_vec(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_int_distribution<long long> num(-40, 40);
  std::uniform_int_distribution<long long> den(1, 12);
  Vec v(dim);
  for (auto& x : v) x = Rational(num(rng), den(rng));
  return v;
}

// Brute-force minimum of the segment distance over t = k/steps; the true
// minimum can only be smaller or equal.
Rational sampled_segment_powered(const Vec& x, const Vec& a, const Vec& b, PNorm norm, int steps) {
  std::optional<Rational> best;
  for (int k = 0; k <= steps; ++k) {
    const Rational t(k, steps);
    Vec p(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) p[i] = t * a[i] + (Rational(1) - t) * b[i];
    auto d = dist_point(x, p, norm).powered();
    if (!best || d < *best) best = d;
  }
  return *best;
}

}  // namespace

TEST(Rational, CanonicalAfterConstruction) {
  const Rational r(BigInt(6), BigInt(-8));
  EXPECT_EQ(r.canonical(), "-3/4");
  EXPECT_EQ(Rational(0).canonical(), "0/1");
  EXPECT_EQ(q(4, 2).str(), "2");
}

TEST(Rational, ZeroDenominatorIsDomainError) {
  EXPECT_THROW(q(1, 0), DomainError);
  EXPECT_THROW(q(1) / Rational(0), DomainError);
}

TEST(Rational, StrictParseRejectsNonCanonical) {
  EXPECT_EQ(Rational::parse_canonical("2/5"), q(2, 5));
  EXPECT_EQ(Rational::parse_canonical("-7/3"), q(-7, 3));
  EXPECT_EQ(Rational::parse_canonical("0/1"), q(0));
  EXPECT_THROW(Rational::parse_canonical("2/4"), ParseError);
  EXPECT_THROW(Rational::parse_canonical("3"), ParseError);
  EXPECT_THROW(Rational::parse_canonical("3/-4"), ParseError);
  EXPECT_THROW(Rational::parse_canonical("03/4"), ParseError);
  EXPECT_THROW(Rational::parse_canonical("-0/1"), ParseError);
  EXPECT_THROW(Rational::parse_canonical("1.5"), ParseError);
  EXPECT_EQ(Rational::parse("6/8"), q(3, 4));
}

TEST(Rational, RandomOperationsStayCanonical) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    auto v = random_vec(rng, 2);
    if (v[1].is_zero()) continue;
    for (const auto& r : {v[0] + v[1], v[0] - v[1], v[0] * v[1], v[0] / v[1]}) {
      EXPECT_TRUE(is_canonical(r.canonical())) << r.canonical();
      EXPECT_EQ(Rational::parse(r.canonical()), r);
    }
  }
}

TEST(Dyadic, Examples) {
  EXPECT_EQ(dyadic(0), q(1));
  EXPECT_EQ(dyadic(3), q(1, 8));
  EXPECT_EQ(dyadic(6), q(1, 64));
  EXPECT_EQ(dyadic(200) * Rational(BigInt(1) << 200, BigInt(1)), q(1));
}

TEST(DistPoint, Examples) {
  const Vec x{q(2, 5), q(0)};
  const Vec y{q(0), q(2, 5)};
  EXPECT_FALSE(dist_point(x, y, PNorm::infinity()).within(q(1, 10)));
  EXPECT_TRUE(dist_point(x, y, PNorm::of(2)).exceeds(q(1, 10)));
  EXPECT_EQ(dist_point(x, y, PNorm::of(2)).powered(), q(8, 25));
  for (auto p : {PNorm::of(1), PNorm::of(2), PNorm::of(3), PNorm::infinity()}) {
    EXPECT_TRUE(dist_point(x, x, p).within(q(0)));
  }
}

TEST(DistPoint, LengthMismatchIsDimensionError) {
  EXPECT_THROW(dist_point(Vec{q(1)}, Vec{q(1), q(2)}, PNorm::infinity()), DimensionError);
}

TEST(DistPoint, PowerCompareAtThreshold) {
  // dist_2 = 5 exactly for (3,4); both sides of the boundary decided exactly.
  const Vec x{q(3), q(4)};
  const Vec o{q(0), q(0)};
  const auto d = dist_point(x, o, PNorm::of(2));
  EXPECT_TRUE(d.within(q(5)));
  EXPECT_FALSE(d.within(q(5) - dyadic(100)));
  EXPECT_FALSE(d.within(q(-1)));
}

TEST(DistPoint, MetricAxiomsOnSamples) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 60; ++i) {
    const auto x = random_vec(rng, 3);
    const auto y = random_vec(rng, 3);
    const auto z = random_vec(rng, 3);
    for (auto p : {PNorm::of(1), PNorm::of(2), PNorm::infinity()}) {
      EXPECT_TRUE(dist_point(x, x, p).powered().is_zero());
      EXPECT_EQ(dist_point(x, y, p).powered(), dist_point(y, x, p).powered());
      const auto dxz = dist_point(x, z, p).powered();
      const auto dxy = dist_point(x, y, p).powered();
      const auto dyz = dist_point(y, z, p).powered();
      if (p.is_infinite() || p.exponent() == 1) {
        EXPECT_LE(dxz, dxy + dyz);
      } else {
        // sqrt(c) <= sqrt(a) + sqrt(b)  <=>  c - a - b <= 2 sqrt(ab)
        const Rational lhs = dxz - dxy - dyz;
        EXPECT_TRUE(lhs.sign() <= 0 || lhs * lhs <= Rational(4) * dxy * dyz);
      }
    }
  }
}

TEST(DistPoint, InfinityBoundedByPowerSum) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 60; ++i) {
    const auto x = random_vec(rng, 4);
    const auto y = random_vec(rng, 4);
    const auto inf = dist_point(x, y, PNorm::infinity()).powered();
    for (unsigned p : {1u, 2u, 3u, 5u}) {
      EXPECT_LE(inf.pow(p), dist_point(x, y, PNorm::of(p)).powered());
    }
  }
}

TEST(DistSegment, Examples) {
  const Vec a{q(2, 5), q(0)};
  const Vec b{q(0), q(2, 5)};
  EXPECT_TRUE(dist_segment(Vec{q(1, 5), q(1, 5)}, a, b, PNorm::infinity()).within(q(0)));
  for (auto p : {PNorm::of(1), PNorm::of(2), PNorm::infinity()}) {
    EXPECT_TRUE(dist_segment(a, a, b, p).within(q(0)));
  }
  const Vec x{q(1, 2), q(1, 2)};
  const auto d = dist_segment(x, a, b, PNorm::infinity());
  // Oracle: sampled minimum over t. At t = 1/2 both coordinates sit 1/2 - 1/5 away,
  // so the minimum is 3/10 and the 1/10 ball does not reach the segment.
  EXPECT_EQ(sampled_segment_powered(x, a, b, PNorm::infinity(), 1000), q(3, 10));
  EXPECT_EQ(*d.exact(), q(3, 10));
  EXPECT_FALSE(d.within(q(1, 10)));
  EXPECT_TRUE(d.within(q(3, 10)));
}

TEST(DistSegment, UnsupportedNorm) {
  const Vec a{q(1), q(0)};
  EXPECT_THROW(dist_segment(a, a, a, PNorm::of(3)), UnsupportedNormError);
}

TEST(DistSegment, NeverAboveEndpointsAndMatchesSampledMinimum) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 80; ++i) {
    const auto x = random_vec(rng, 3);
    const auto a = random_vec(rng, 3);
    const auto b = random_vec(rng, 3);
    for (auto p : {PNorm::of(1), PNorm::of(2), PNorm::infinity()}) {
      const auto seg = dist_segment(x, a, b, p).powered();
      EXPECT_LE(seg, dist_point(x, a, p).powered());
      EXPECT_LE(seg, dist_point(x, b, p).powered());
      EXPECT_LE(seg, sampled_segment_powered(x, a, b, p, 240));
    }
  }
}

TEST(PNorm, ParseAndFormat) {
  EXPECT_TRUE(PNorm::parse("inf").is_infinite());
  EXPECT_EQ(PNorm::parse("2").exponent(), 2u);
  EXPECT_THROW(PNorm::parse("0"), DomainError);
  EXPECT_THROW(PNorm::parse("x"), ParseError);
  EXPECT_EQ(format_vec(Vec{q(2, 5), q(0)}), "(2/5,0)");
}
