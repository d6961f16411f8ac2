#pragma once

// The input family Omega_{N1,N2}(theta) for LP, basis pursuit and LASSO,
// closed-form solution sets, anchor points and a brute-force grid oracle.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "crp/exactnum.hpp"

namespace crp {

enum class ProblemKind { LP, BP, LASSO };

std::string to_string(ProblemKind kind);
ProblemKind parse_problem_kind(std::string_view text);

struct Family {
  ProblemKind kind = ProblemKind::LP;
  Rational kappa{1, 10};
  Rational eta{1, 20};     // basis pursuit only
  Rational lambda{1, 20};  // LASSO only
  Rational theta{1, 4};
  PNorm norm = PNorm::infinity();

  /// eta for BP, lambda for LASSO, zero for LP.
  Rational parameter() const;

  static Family lp() { return Family{}; }
  static Family bp(Rational eta = Rational(1, 20)) {
    Family f;
    f.kind = ProblemKind::BP;
    f.eta = std::move(eta);
    return f;
  }
  static Family lasso(Rational lambda = Rational(1, 20)) {
    Family f;
    f.kind = ProblemKind::LASSO;
    f.lambda = std::move(lambda);
    return f;
  }

  friend bool operator==(const Family&, const Family&) = default;
};

struct Dims {
  std::size_t n1 = 2;  // columns of U, length of a solution vector
  std::size_t n2 = 1;  // rows of U

  friend bool operator==(const Dims&, const Dims&) = default;
};

struct InstanceParams {
  Rational u1{1, 2};
  Rational u2{1, 2};

  friend bool operator==(const InstanceParams&, const InstanceParams&) = default;
};

using Matrix = std::vector<Vec>;

class ProblemInstance {
 public:
  ProblemInstance(Family family, Dims dims, InstanceParams params);

  const Family& family() const { return family_; }
  const Dims& dims() const { return dims_; }
  const InstanceParams& params() const { return params_; }
  const Matrix& matrix() const { return u_; }
  const Vec& rhs() const { return b_; }

  /// k = N2 + N2*N1 evaluation coordinates.
  std::size_t coordinate_count() const { return dims_.n2 + dims_.n2 * dims_.n1; }
  /// f_i for 1-based i: U entries row-major (so f_1 = u1, f_2 = u2), then b.
  const Rational& coordinate(std::size_t i) const;

  friend bool operator==(const ProblemInstance& a, const ProblemInstance& b) {
    return a.family_ == b.family_ && a.dims_ == b.dims_ && a.params_ == b.params_;
  }

 private:
  Family family_;
  Dims dims_;
  InstanceParams params_;
  Matrix u_;
  Vec b_;
};

struct PointSolution {
  Vec point;
  friend bool operator==(const PointSolution&, const PointSolution&) = default;
};

struct SegmentSolution {
  Vec a;
  Vec b;
  friend bool operator==(const SegmentSolution&, const SegmentSolution&) = default;
};

/// Minimizer set: a single point, or the segment {t*a + (1-t)*b}.
using SolutionSet = std::variant<PointSolution, SegmentSolution>;

std::string format_solution(const SolutionSet& s);
/// Exact distance from x to the solution set in the family norm.
Distance distance_to(const SolutionSet& s, const Vec& x, PNorm norm);

struct AnchorSets {
  SegmentSolution s0;  // endpoints y1, y2
  Vec y1;
  Vec y2;
};

struct SeparationCheck {
  bool ok = false;
  Distance distance;  // dist(y1, y2) in the family norm
};

/// Checks the family parameters (kappa > 0, theta range, BP/LASSO parameter ranges)
/// and that the anchors are more than 2*kappa apart. Throws ConfigurationError.
void require_valid(const Family& family);

ProblemInstance build_instance(const Family& family, const Dims& dims, const InstanceParams& params);
SolutionSet solve_closed_form(const ProblemInstance& inst);
/// Optimal objective value implied by the closed form.
Rational optimal_value(const ProblemInstance& inst);
AnchorSets anchor_sets(const Family& family, const Dims& dims);
/// j = 0: iota^0; j in {1, 2}: iota^j_t.
ProblemInstance iota_anchor(const Family& family, const Dims& dims, int j, std::uint64_t t);

struct ObjectiveValue {
  Rational value;
  bool feasible = true;
};

ObjectiveValue objective_value(const ProblemInstance& inst, const Vec& x);

struct GridResult {
  Vec point;
  Rational objective;
};

/// Exhaustive search over the rational grid [0, 6*kappa/theta]^2 in (x1, x2),
/// other coordinates zero. LP walks the feasible line parameterized by x1.
GridResult brute_force_oracle(const ProblemInstance& inst, const Rational& grid_step);
/// Upper bound on (grid optimum - true optimum) for the given step.
Rational grid_gap_bound(const ProblemInstance& inst, const Rational& grid_step);

SeparationCheck validate_separation(const Family& family);

using FieldMap = std::map<std::string, std::string, std::less<>>;

/// Splits "key=value key=value" into a map; duplicate keys are a ParseError.
FieldMap parse_fields(std::string_view record);
const std::string& require_field(const FieldMap& fields, std::string_view key);

/// "family=LP kappa=1/10 p=inf theta=1/4" (+ eta= for BP, lambda= for LASSO).
std::string serialize_family(const Family& family);
Family parse_family(const FieldMap& fields);

/// Canonical one-line text record of an instance.
std::string serialize_instance(const ProblemInstance& inst);
ProblemInstance parse_instance(std::string_view record);

}  // namespace crp
