#include "crp/randomized.hpp"

#include <algorithm>
#include <set>

#include "crp/errors.hpp"

namespace crp {

namespace {

void require_bits(std::string_view sigma) {
  for (char c : sigma) {
    if (c != '0' && c != '1') throw DomainError("tape prefix contains a non-bit character");
  }
}

std::uint64_t ceil_log2(std::size_t m) {
  std::uint64_t k = 0;
  while ((std::size_t{1} << k) < m) ++k;
  return k;
}

std::vector<Bits> all_strings(std::uint64_t t) {
  if (t > 30) throw BudgetExhausted("tape length " + std::to_string(t) + " too large to enumerate");
  std::vector<Bits> out;
  out.reserve(std::size_t{1} << t);
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << t); ++code) {
    Bits s(t, '0');
    for (std::uint64_t i = 0; i < t; ++i) {
      if ((code >> (t - 1 - i)) & 1U) s[i] = '1';
    }
    out.push_back(std::move(s));
  }
  return out;
}

// Halting outputs on all length-t tapes, grouped by output in first-seen order.
struct Partition {
  std::vector<std::pair<PtmOutput, std::vector<Bits>>> groups;
  bool all_halted = true;
};

Partition partition(const TapeProgram& program, std::uint64_t t) {
  Partition p;
  for (auto& s : all_strings(t)) {
    auto out = program(s);
    if (!out) {
      p.all_halted = false;
      continue;
    }
    auto it = std::find_if(p.groups.begin(), p.groups.end(), [&](const auto& g) { return g.first == *out; });
    if (it == p.groups.end()) {
      p.groups.emplace_back(*out, std::vector<Bits>{std::move(s)});
    } else {
      it->second.push_back(std::move(s));
    }
  }
  return p;
}

}  // namespace

PreMeasure::PreMeasure(std::string name, Approximator r, bool exact)
    : name_(std::move(name)), r_(std::move(r)), exact_(exact) {}

Rational PreMeasure::approx(std::string_view sigma, std::uint64_t n) const {
  require_bits(sigma);
  return r_(sigma, n);
}

PreMeasure bernoulli_premeasure(const Rational& p) {
  if (p.sign() < 0 || p > Rational(1)) throw DomainError("Bernoulli parameter " + p.str() + " outside [0,1]");
  return PreMeasure(
      "Bernoulli(" + p.str() + ")",
      [p](std::string_view sigma, std::uint64_t) {
        const auto ones = static_cast<unsigned>(std::count(sigma.begin(), sigma.end(), '1'));
        const auto zeros = static_cast<unsigned>(sigma.size()) - ones;
        return p.pow(ones) * (Rational(1) - p).pow(zeros);
      },
      true);
}

bool check_additivity(const PreMeasure& pm, std::string_view sigma, std::uint64_t n) {
  const std::string s(sigma);
  const auto whole = pm.approx(s, n);
  const auto split = pm.approx(s + "0", n) + pm.approx(s + "1", n);
  const auto root = pm.approx("", n);
  if (pm.exact()) return whole == split && root == Rational(1);
  const auto tol = Rational(3) * dyadic(n);
  return (whole - split).abs() <= tol && (root - Rational(1)).abs() <= dyadic(n);
}

Rational cylinder_mass(const PreMeasure& pm, const std::vector<Bits>& strings, std::uint64_t n) {
  if (strings.empty()) return Rational(0);
  const auto len = strings.front().size();
  std::set<std::string_view> seen;
  for (const auto& s : strings) {
    if (s.size() != len) throw DomainError("cylinder strings have mixed lengths");
    if (!seen.insert(s).second) throw DomainError("duplicate cylinder string '" + s + "'");
  }
  const auto precision = n + ceil_log2(std::max<std::size_t>(1, strings.size()));
  Rational total;
  for (const auto& s : strings) total += pm.approx(s, precision);
  return total;
}

std::optional<PtmOutput> run_tape(const TapeProgram& program, std::string_view bits) {
  require_bits(bits);
  std::optional<PtmOutput> first;
  std::size_t first_len = 0;
  for (std::size_t len = 0; len <= bits.size(); ++len) {
    auto out = program(bits.substr(0, len));
    if (first) {
      if (!out || *out != *first) {
        throw ContractError("prefix consistency violated: output '" + *first + "' at length " +
                            std::to_string(first_len) + " changed at length " + std::to_string(len));
      }
    } else if (out) {
      first = std::move(out);
      first_len = len;
    }
  }
  return first;
}

std::vector<Bits> cylinder_set(const TapeProgram& program, const PtmOutput& y, std::uint64_t t) {
  std::vector<Bits> out;
  for (auto& s : all_strings(t)) {
    auto v = program(s);
    if (v && *v == y) out.push_back(std::move(s));
  }
  return out;
}

DerandomizeResult derandomize_single_valued(const TapeProgram& program, const PreMeasure& pm,
                                            const DerandomizeOptions& options) {
  for (std::uint64_t t = 1; t <= options.max_depth; ++t) {
    const auto threshold = Rational(1, 2) + dyadic(t);
    for (const auto& [y, strings] : partition(program, t).groups) {
      if (cylinder_mass(pm, strings, t) > threshold) return {y, t, false};
    }
  }
  throw BudgetExhausted("single-valued derandomizer did not settle by tape length " +
                        std::to_string(options.max_depth));
}

std::uint64_t multi_valued_precision(const Rational& p) {
  const auto gap = p - Rational(1, 2);
  if (gap.sign() <= 0) throw DomainError("success probability must exceed 1/2, got " + p.str());
  std::uint64_t n = 0;
  while (!(dyadic(n) < gap)) ++n;
  return n;
}

DerandomizeResult derandomize_multi_valued(const TapeProgram& program, const PreMeasure& pm, const Rational& p,
                                           const PtmOutput& y0, const DerandomizeOptions& options) {
  const auto n0 = multi_valued_precision(p);
  for (std::uint64_t t = 1; t <= options.max_depth; ++t) {
    const auto part = partition(program, t);
    for (const auto& [y, strings] : part.groups) {
      if (cylinder_mass(pm, strings, n0) > Rational(1, 2)) return {y, t, false};
    }
    if (part.all_halted) return {y0, t, true};
  }
  throw BudgetExhausted("multi-valued derandomizer did not settle by tape length " +
                        std::to_string(options.max_depth));
}

Ptm<int> or_ptm() {
  return {"OR",
          [](const int& g, std::string_view bits) -> std::optional<PtmOutput> {
            if (g != 0 && g != 1) throw DomainError("OR machine input must be 0 or 1");
            if (bits.empty()) return std::nullopt;
            if (bits[0] == '0') return std::to_string(g);
            if (bits.size() < 2) return std::nullopt;
            return std::to_string(bits[1] == '0' ? g : 1 - g);
          },
          true};
}

Ptm<int> constant_ptm(const PtmOutput& c) {
  return {"Const(" + c + ")", [c](const int&, std::string_view) -> std::optional<PtmOutput> { return c; }, true};
}

Ptm<int> split_ptm() {
  return {"Split",
          [](const int&, std::string_view bits) -> std::optional<PtmOutput> {
            if (bits.empty()) return std::nullopt;
            return PtmOutput(bits[0] == '0' ? "a" : "b");
          },
          true};
}

RandomizedChecker coin_checker() {
  return {"Coin",
          [](InputAccess&, const ProblemContext&, const Vec&, std::string_view bits) -> std::optional<bool> {
            if (bits.empty()) return std::nullopt;
            if (bits[0] == '0') return true;
            if (bits.size() < 2) return std::nullopt;
            return bits[1] == '0';
          }};
}

std::string derandomized_id(const std::string& checker_id, const Rational& p, bool y0) {
  return "Derand(" + checker_id + "," + p.str() + "," + (y0 ? "1" : "0") + ")";
}

std::optional<DerandomizedName> parse_derandomized_id(std::string_view id) {
  constexpr std::string_view prefix = "Derand(";
  if (id.substr(0, prefix.size()) != prefix || id.back() != ')') return std::nullopt;
  const auto body = id.substr(prefix.size(), id.size() - prefix.size() - 1);
  const auto c2 = body.rfind(',');
  if (c2 == std::string_view::npos || c2 == 0) return std::nullopt;
  const auto c1 = body.rfind(',', c2 - 1);
  if (c1 == std::string_view::npos || c1 == 0) return std::nullopt;
  const auto flag = body.substr(c2 + 1);
  if (flag != "0" && flag != "1") return std::nullopt;
  try {
    return DerandomizedName{std::string(body.substr(0, c1)), Rational::parse(body.substr(c1 + 1, c2 - c1 - 1)),
                            flag == "1"};
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

CheckerPtr derandomized_checker(const RandomizedChecker& checker, const PreMeasure& pm, const Rational& p, bool y0,
                                const DerandomizeOptions& options) {
  multi_valued_precision(p);  // validates p
  return make_checker(derandomized_id(checker.id, p, y0),
                      [step = checker.step, pm, p, y0, options](InputAccess& access, const ProblemContext& ctx,
                                                                const Vec& answer) {
                        const TapeProgram program = [&](std::string_view bits) -> std::optional<PtmOutput> {
                          auto flag = step(access, ctx, answer, bits);
                          if (!flag) return std::nullopt;
                          return PtmOutput(*flag ? "1" : "0");
                        };
                        return derandomize_multi_valued(program, pm, p, y0 ? "1" : "0", options).value == "1";
                      });
}

}  // namespace crp
