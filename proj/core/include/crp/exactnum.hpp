#pragma once

// Exact rational arithmetic and root-free l_p distance decisions.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crp {

using BigInt = mpz_class;

/// Exact fraction, always held in lowest terms with a positive denominator.
class Rational {
 public:
  Rational() = default;
  Rational(long long value) : value_(static_cast<signed long>(value)) {}  // NOLINT(google-explicit-constructor)
  Rational(const BigInt& num, const BigInt& den);
  Rational(long long num, long long den) : Rational(BigInt(static_cast<signed long>(num)), BigInt(static_cast<signed long>(den))) {}

  /// Accepts "a" or "a/b" with any sign placement and reduces it.
  static Rational parse(std::string_view text);
  /// Accepts only "num/den" already in canonical form ("2/4" and "3" are rejected).
  static Rational parse_canonical(std::string_view text);

  BigInt numerator() const { return value_.get_num(); }
  BigInt denominator() const { return value_.get_den(); }

  int sign() const { return sgn(value_); }
  bool is_zero() const { return sign() == 0; }
  Rational abs() const;
  Rational pow(unsigned exponent) const;

  /// Short human form: "2/5", "0", "-3".
  std::string str() const;
  /// Record form, always "num/den": "2/5", "0/1".
  std::string canonical() const;

  Rational& operator+=(const Rational& other);
  Rational& operator-=(const Rational& other);
  Rational& operator*=(const Rational& other);
  Rational& operator/=(const Rational& other);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  Rational operator-() const;

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.value_, b.value_) == 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  const mpq_class& raw() const { return value_; }

 private:
  explicit Rational(mpq_class value) : value_(std::move(value)) {}
  mpq_class value_;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);

/// Returns exactly 2^-n.
Rational dyadic(std::uint64_t n);

/// Norm exponent p in N>=1 or infinity.
class PNorm {
 public:
  static PNorm infinity() { return PNorm(std::nullopt); }
  static PNorm of(unsigned p);
  static PNorm parse(std::string_view text);

  bool is_infinite() const { return !p_.has_value(); }
  /// Finite exponent; only valid when !is_infinite().
  unsigned exponent() const;
  std::string str() const;

  friend bool operator==(const PNorm&, const PNorm&) = default;

 private:
  explicit PNorm(std::optional<unsigned> p) : p_(p) {}
  std::optional<unsigned> p_;
};

using Vec = std::vector<Rational>;

/// Scaled canonical basis vector scale * e_j (j is 1-based).
Vec basis_vector(std::size_t dim, std::size_t j, const Rational& scale = Rational(1));
Vec midpoint(const Vec& a, const Vec& b);
/// "(2/5,0,0)".
std::string format_vec(std::span<const Rational> v);
bool is_canonical(std::string_view text);

/// Exact handle on an l_p distance. For finite p it stores dist^p and every
/// threshold test is decided as sum |d_i|^p <=> r^p, so no root is ever taken.
class Distance {
 public:
  Distance(PNorm norm, Rational powered);

  PNorm norm() const { return norm_; }
  /// dist^p for finite p, dist itself for p = infinity.
  const Rational& powered() const { return powered_; }

  bool within(const Rational& radius) const;  // dist <= radius
  bool exceeds(const Rational& radius) const { return !within(radius); }

  /// The distance itself when it is rational by construction (p = 1 or infinity).
  std::optional<Rational> exact() const;
  /// "2/5" for p in {1, inf}; "dist^2=8/25" otherwise.
  std::string describe() const;

 private:
  PNorm norm_;
  Rational powered_;
};

Distance dist_point(std::span<const Rational> x, std::span<const Rational> y, PNorm norm);

/// Distance from x to the segment {t*a + (1-t)*b : t in [0,1]}; p must be 1, 2 or infinity.
Distance dist_segment(std::span<const Rational> x, std::span<const Rational> a, std::span<const Rational> b,
                      PNorm norm);

}  // namespace crp
