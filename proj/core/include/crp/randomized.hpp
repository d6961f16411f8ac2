#pragma once

// Computable pre-measures on finite bit strings, probabilistic machines on
// finite tape prefixes, and the two derandomizers.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crp/subject.hpp"

namespace crp {

/// A finite random-tape prefix over {'0','1'}.
using Bits = std::string;
using PtmOutput = std::string;

class PreMeasure {
 public:
  using Approximator = std::function<Rational(std::string_view sigma, std::uint64_t n)>;

  PreMeasure(std::string name, Approximator r, bool exact);

  /// r(sigma, n), within 2^-n of rho(sigma).
  Rational approx(std::string_view sigma, std::uint64_t n) const;
  bool exact() const { return exact_; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  Approximator r_;
  bool exact_;
};

/// rho_p(sigma) = p^k (1-p)^(|sigma|-k) with k the number of ones; exact.
PreMeasure bernoulli_premeasure(const Rational& p);

/// rho(sigma) == rho(sigma0) + rho(sigma1), exactly for exact measures and
/// within 3*2^-n otherwise; also checks rho(empty) against 1.
bool check_additivity(const PreMeasure& pm, std::string_view sigma, std::uint64_t n);

/// Sum of r(sigma, n + ceil(log2 max(1, |strings|))). Strings must be distinct and of equal length.
Rational cylinder_mass(const PreMeasure& pm, const std::vector<Bits>& strings, std::uint64_t n);

/// A machine already applied to its input: tape prefix -> output, or nullopt
/// when it needs more bits.
using TapeProgram = std::function<std::optional<PtmOutput>(std::string_view bits)>;

template <class Input>
struct Ptm {
  std::string id;
  std::function<std::optional<PtmOutput>(const Input&, std::string_view bits)> step;
  bool always_halts = false;

  TapeProgram bind(Input input) const {
    return [fn = step, input = std::move(input)](std::string_view bits) { return fn(input, bits); };
  }
};

/// Runs the tape program and verifies prefix consistency along the given bits:
/// an output produced on a prefix must persist. Throws ContractError otherwise.
std::optional<PtmOutput> run_tape(const TapeProgram& program, std::string_view bits);

template <class Input>
std::optional<PtmOutput> run_ptm(const Ptm<Input>& ptm, const Input& input, std::string_view bits) {
  return run_tape(ptm.bind(input), bits);
}

/// All length-t strings on which the program outputs y, in lexicographic order.
std::vector<Bits> cylinder_set(const TapeProgram& program, const PtmOutput& y, std::uint64_t t);

struct DerandomizeResult {
  PtmOutput value;
  std::uint64_t depth = 0;  // tape length t at which the loop stopped
  bool fallback = false;    // multi-valued only: returned y0 at the all-halted depth
};

struct DerandomizeOptions {
  std::uint64_t max_depth = 20;
};

/// Loop t = 1, 2, ...: return the first output y (first-seen in lexicographic tape
/// order) with mass(S(y,t)) > 1/2 + 2^-t. Throws BudgetExhausted past max_depth.
DerandomizeResult derandomize_single_valued(const TapeProgram& program, const PreMeasure& pm,
                                            const DerandomizeOptions& options = {});

/// n0 = least n with 2^-n < p - 1/2.
std::uint64_t multi_valued_precision(const Rational& p);

/// Loop t: return y if r(S(y,t), n0) > 1/2; else y0 once every length-t tape halts.
DerandomizeResult derandomize_multi_valued(const TapeProgram& program, const PreMeasure& pm, const Rational& p,
                                           const PtmOutput& y0, const DerandomizeOptions& options = {});

/// OR machine on ground truth g in {0,1}: outputs g when bit1 = 0 or bit2 = 0, else 1-g.
Ptm<int> or_ptm();
Ptm<int> constant_ptm(const PtmOutput& c);
/// Outputs "a" on bit1 = 0 and "b" on bit1 = 1, regardless of input.
Ptm<int> split_ptm();

/// Exit-flag checker reading random bits.
struct RandomizedChecker {
  std::string id;
  std::function<std::optional<bool>(InputAccess&, const ProblemContext&, const Vec& answer, std::string_view bits)> step;
};

/// Flags 0 only on tapes starting "11", so 1 with probability 3/4 under the fair coin.
RandomizedChecker coin_checker();

/// "Derand(<checker id>,<p>,<y0>)", e.g. "Derand(Coin,3/4,1)".
std::string derandomized_id(const std::string& checker_id, const Rational& p, bool y0);

struct DerandomizedName {
  std::string checker_id;
  Rational p;
  bool y0 = true;
};
std::optional<DerandomizedName> parse_derandomized_id(std::string_view id);

/// Deterministic checker obtained by running derandomize_multi_valued on each call.
CheckerPtr derandomized_checker(const RandomizedChecker& checker, const PreMeasure& pm, const Rational& p, bool y0,
                                const DerandomizeOptions& options = {});

}  // namespace crp
