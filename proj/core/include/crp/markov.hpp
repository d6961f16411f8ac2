#pragma once

// Inputs as approximation programs: descriptors, the fuel-metered evaluation
// engine behind self-referential inputs, and privileged ground truth.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "crp/problems.hpp"
#include "crp/subject.hpp"

namespace crp {

enum class SubjectMode { Plain, ExitFlag };

struct SubjectRef {
  SolverPtr solver;
  CheckerPtr checker;  // required in exit-flag mode
  SubjectMode mode = SubjectMode::Plain;

  friend bool operator==(const SubjectRef& a, const SubjectRef& b);
};

struct ExactDescriptor {
  ProblemInstance instance;
  friend bool operator==(const ExactDescriptor&, const ExactDescriptor&) = default;
};

/// Coordinate i at precision n is f_i(iota^0) for n < t and f_i(iota^j_t) otherwise.
struct ScheduleDescriptor {
  Family family;
  Dims dims;
  int j = 1;
  std::uint64_t t = 1;
  friend bool operator==(const ScheduleDescriptor&, const ScheduleDescriptor&) = default;
};

struct DiagonalDescriptor {
  Family family;
  Dims dims;
  SubjectRef subject;
  friend bool operator==(const DiagonalDescriptor&, const DiagonalDescriptor&) = default;
};

using Descriptor = std::variant<ExactDescriptor, ScheduleDescriptor, DiagonalDescriptor>;

std::string serialize_descriptor(const Descriptor& d);
/// Subject references are resolved through the registry.
Descriptor parse_descriptor(std::string_view text, const SubjectRegistry& registry);

/// Remaining fuel; nullopt is an unlimited pool.
using FuelPool = std::optional<std::uint64_t>;

struct RunComplete {
  int verdict = 0;  // 1, 2 or 3
  std::uint64_t fuel = 0;
  Vec answer;               // the solver's answer during the run
  std::optional<bool> flag;  // checker output, exit-flag mode only
  friend bool operator==(const RunComplete&, const RunComplete&) = default;
};

struct RunAborted {
  friend bool operator==(const RunAborted&, const RunAborted&) = default;
};

using RunOutcome = std::variant<RunComplete, RunAborted>;

std::string describe(const RunOutcome& outcome);

class MarkovInput {
 public:
  explicit MarkovInput(Descriptor descriptor);

  const Descriptor& descriptor() const;
  const Family& family() const;
  const Dims& dims() const;
  ProblemContext context() const { return {family(), dims()}; }
  std::size_t coordinate_count() const { return dims().n2 + dims().n2 * dims().n1; }
  /// Canonical serialization, computed once.
  const std::string& text() const;
  bool is_diagonal() const { return std::holds_alternative<DiagonalDescriptor>(descriptor()); }

  /// phi_i(n): 1 <= i <= k, n >= 1.
  Rational eval_coord(std::size_t i, std::uint64_t n) const;

  /// Diagonal only. Results are memoized per pool.
  RunOutcome metered_run(FuelPool pool) const;
  /// Same run without consulting the cache for the top level (used for replay checks).
  RunOutcome fresh_run(FuelPool pool) const;

  ProblemInstance ground_truth() const;

  /// Guards against runaway diagnostics; never changes a verdict that completes below it.
  void set_fuel_guard(std::uint64_t max_fuel);

  struct State;  // engine internals

 private:
  explicit MarkovInput(std::shared_ptr<State> state);
  std::shared_ptr<State> state_;
};

/// InputAccess backed by eval_coord, with no fuel accounting.
class DirectAccess : public InputAccess {
 public:
  explicit DirectAccess(const MarkovInput& input) : input_(input) {}
  std::size_t coordinate_count() const override { return input_.coordinate_count(); }
  Rational query(std::size_t i, std::uint64_t n) override {
    ++queries_;
    return input_.eval_coord(i, n);
  }
  const std::string& program() const override { return input_.text(); }
  std::uint64_t queries() const { return queries_; }

 private:
  const MarkovInput& input_;
  std::uint64_t queries_ = 0;
};

Rational eval_coord(const MarkovInput& input, std::size_t i, std::uint64_t n);
RunOutcome metered_run(const MarkovInput& input, FuelPool pool);
ProblemInstance ground_truth(const MarkovInput& input);
std::size_t descriptor_bytes(const MarkovInput& input);

/// Bytes contributed by subject references (solver plus checker) in a Diagonal descriptor.
std::size_t subject_bytes(const DiagonalDescriptor& d);
std::size_t decimal_digits(std::uint64_t value);
/// C such that descriptor_bytes = subject_bytes + C + digits(N1) for a Diagonal descriptor.
std::size_t engine_constant(const DiagonalDescriptor& d);

MarkovInput make_exact(const ProblemInstance& inst);
MarkovInput make_schedule(const Family& family, const Dims& dims, int j, std::uint64_t t);
MarkovInput make_diagonal(const Family& family, const Dims& dims, SolverPtr solver);
MarkovInput make_exitflag_diagonal(const Family& family, const Dims& dims, SolverPtr solver, CheckerPtr checker);

}  // namespace crp
