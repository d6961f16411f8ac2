#include "crp/exactnum.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>

#include "crp/errors.hpp"

namespace crp {

namespace {

bool is_integer_text(std::string_view text, bool allow_sign) {
  if (text.empty()) return false;
  std::size_t i = 0;
  if (allow_sign && text[0] == '-') i = 1;
  if (i == text.size()) return false;
  return std::all_of(text.begin() + static_cast<std::ptrdiff_t>(i), text.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; });
}

BigInt parse_integer(std::string_view text) {
  if (!is_integer_text(text, true)) throw ParseError("not an integer: '" + std::string(text) + "'");
  return BigInt(std::string(text), 10);
}

}  // namespace

Rational::Rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  value_ = mpq_class(num, den);
  value_.canonicalize();
}

Rational Rational::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text), BigInt(1));
  return Rational(parse_integer(text.substr(0, slash)), parse_integer(text.substr(slash + 1)));
}

Rational Rational::parse_canonical(std::string_view text) {
  if (!is_canonical(text)) throw ParseError("not a canonical num/den rational: '" + std::string(text) + "'");
  return parse(text);
}

bool is_canonical(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return false;
  const auto num = text.substr(0, slash);
  const auto den = text.substr(slash + 1);
  if (!is_integer_text(num, true) || !is_integer_text(den, false)) return false;
  // No leading zeros, no "-0".
  const auto digits = num[0] == '-' ? num.substr(1) : num;
  if (digits.size() > 1 && digits[0] == '0') return false;
  if (num[0] == '-' && digits == "0") return false;
  if (den.size() > 1 && den[0] == '0') return false;
  const BigInt n(std::string(num), 10);
  const BigInt d(std::string(den), 10);
  if (d <= 0) return false;
  BigInt g;
  mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  return g == 1;
}

Rational Rational::abs() const { return Rational(mpq_class(::abs(value_))); }

Rational Rational::pow(unsigned exponent) const {
  BigInt num;
  BigInt den;
  mpz_pow_ui(num.get_mpz_t(), value_.get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), value_.get_den_mpz_t(), exponent);
  return Rational(num, den);
}

std::string Rational::str() const {
  if (value_.get_den() == 1) return value_.get_num().get_str();
  return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

std::string Rational::canonical() const { return value_.get_num().get_str() + "/" + value_.get_den().get_str(); }

Rational& Rational::operator+=(const Rational& other) {
  value_ += other.value_;
  return *this;
}

Rational& Rational::operator-=(const Rational& other) {
  value_ -= other.value_;
  return *this;
}

Rational& Rational::operator*=(const Rational& other) {
  value_ *= other.value_;
  return *this;
}

Rational& Rational::operator/=(const Rational& other) {
  if (other.is_zero()) throw DomainError("division by zero");
  value_ /= other.value_;
  return *this;
}

Rational Rational::operator-() const { return Rational(mpq_class(-value_)); }

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

Rational dyadic(std::uint64_t n) {
  BigInt den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, n);
  return Rational(BigInt(1), den);
}

PNorm PNorm::of(unsigned p) {
  if (p < 1) throw DomainError("norm exponent must be >= 1");
  return PNorm(p);
}

PNorm PNorm::parse(std::string_view text) {
  if (text == "inf" || text == "infinity") return infinity();
  if (!is_integer_text(text, false)) throw ParseError("bad norm exponent '" + std::string(text) + "'");
  return of(static_cast<unsigned>(std::stoul(std::string(text))));
}

unsigned PNorm::exponent() const {
  if (!p_) throw DomainError("infinite norm has no finite exponent");
  return *p_;
}

std::string PNorm::str() const { return p_ ? std::to_string(*p_) : "inf"; }

Vec basis_vector(std::size_t dim, std::size_t j, const Rational& scale) {
  if (j < 1 || j > dim) throw DimensionError("basis index out of range");
  Vec v(dim);
  v[j - 1] = scale;
  return v;
}

Vec midpoint(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("midpoint of vectors with different lengths");
  Vec m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) m[i] = (a[i] + b[i]) / Rational(2);
  return m;
}

std::string format_vec(std::span<const Rational> v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += v[i].str();
  }
  return out + ")";
}

Distance::Distance(PNorm norm, Rational powered) : norm_(norm), powered_(std::move(powered)) {
  if (powered_.sign() < 0) throw DomainError("negative distance");
}

bool Distance::within(const Rational& radius) const {
  if (radius.sign() < 0) return false;
  if (norm_.is_infinite()) return powered_ <= radius;
  return powered_ <= radius.pow(norm_.exponent());
}

std::optional<Rational> Distance::exact() const {
  if (norm_.is_infinite() || norm_.exponent() == 1) return powered_;
  return std::nullopt;
}

std::string Distance::describe() const {
  if (auto d = exact()) return d->str();
  return "dist^" + norm_.str() + "=" + powered_.str();
}

namespace {

void require_same_length(std::span<const Rational> x, std::span<const Rational> y) {
  if (x.size() != y.size()) {
    throw DimensionError("vector lengths differ: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
}

Rational powered_norm(std::span<const Rational> diff, PNorm norm) {
  Rational acc;
  for (const auto& d : diff) {
    if (norm.is_infinite()) {
      acc = max(acc, d.abs());
    } else {
      acc += d.abs().pow(norm.exponent());
    }
  }
  return acc;
}

}  // namespace

Distance dist_point(std::span<const Rational> x, std::span<const Rational> y, PNorm norm) {
  require_same_length(x, y);
  Vec diff(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - y[i];
  return Distance(norm, powered_norm(diff, norm));
}

Distance dist_segment(std::span<const Rational> x, std::span<const Rational> a, std::span<const Rational> b,
                      PNorm norm) {
  require_same_length(x, a);
  require_same_length(x, b);
  if (!norm.is_infinite() && norm.exponent() > 2) {
    throw UnsupportedNormError("segment distance supports p in {1, 2, inf}, got p=" + norm.str());
  }
  // Segment point at parameter t is b + t*w; the residual is c - t*w.
  const std::size_t d = x.size();
  Vec c(d);
  Vec w(d);
  for (std::size_t i = 0; i < d; ++i) {
    c[i] = x[i] - b[i];
    w[i] = a[i] - b[i];
  }
  const auto residual_at = [&](const Rational& t) {
    Vec r(d);
    for (std::size_t i = 0; i < d; ++i) r[i] = c[i] - t * w[i];
    return powered_norm(r, norm);
  };

  if (!norm.is_infinite() && norm.exponent() == 2) {
    Rational ww;
    Rational cw;
    for (std::size_t i = 0; i < d; ++i) {
      ww += w[i] * w[i];
      cw += c[i] * w[i];
    }
    Rational t;
    if (!ww.is_zero()) t = max(Rational(0), min(Rational(1), cw / ww));
    return Distance(norm, residual_at(t));
  }

  // p in {1, inf}: the objective is convex piecewise linear in t, so its minimum
  // over [0, 1] sits at an endpoint or at a breakpoint.
  std::vector<Rational> candidates{Rational(0), Rational(1)};
  std::vector<std::size_t> moving;
  Rational floor_level;  // max |c_i| over coordinates the segment does not move
  for (std::size_t i = 0; i < d; ++i) {
    if (w[i].is_zero()) {
      floor_level = max(floor_level, c[i].abs());
    } else {
      moving.push_back(i);
      candidates.push_back(c[i] / w[i]);
    }
  }
  if (norm.is_infinite()) {
    for (std::size_t ii = 0; ii < moving.size(); ++ii) {
      const auto i = moving[ii];
      candidates.push_back((c[i] - floor_level) / w[i]);
      candidates.push_back((c[i] + floor_level) / w[i]);
      for (std::size_t jj = ii + 1; jj < moving.size(); ++jj) {
        const auto j = moving[jj];
        if (w[i] != w[j]) candidates.push_back((c[i] - c[j]) / (w[i] - w[j]));
        if (w[i] != -w[j]) candidates.push_back((c[i] + c[j]) / (w[i] + w[j]));
      }
    }
  }
  std::optional<Rational> best;
  for (const auto& t : candidates) {
    if (t.sign() < 0 || t > Rational(1)) continue;
    auto value = residual_at(t);
    if (!best || value < *best) best = std::move(value);
  }
  return Distance(norm, *best);
}

}  // namespace crp
