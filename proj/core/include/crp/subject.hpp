#pragma once

// Subjects are the solvers and checkers under test. They only ever see an input
// through InputAccess: coordinate approximations plus the canonical program text.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "crp/problems.hpp"

namespace crp {

struct ProblemContext {
  Family family;
  Dims dims;
};

class InputAccess {
 public:
  virtual ~InputAccess() = default;
  virtual std::size_t coordinate_count() const = 0;
  /// phi_i(n) for 1-based i and precision n >= 1.
  virtual Rational query(std::size_t i, std::uint64_t n) = 0;
  /// Canonical descriptor text of the input (the program itself).
  virtual const std::string& program() const = 0;
};

enum class SubjectKind { Builtin, External };

using SolverFn = std::function<Vec(InputAccess&, const ProblemContext&)>;
/// Exit-flag checkers receive the solver's answer on the same input.
using CheckerFn = std::function<bool(InputAccess&, const ProblemContext&, const Vec& answer)>;
using OracleSolverFn = std::function<Vec(InputAccess&, const ProblemContext&, const Vec& probe)>;
using OracleCheckerFn = std::function<bool(InputAccess&, const ProblemContext&, const Vec& answer, const Vec& probe)>;

struct SubjectIdentity {
  std::string id;
  SubjectKind kind = SubjectKind::Builtin;
  std::size_t declared_size = 0;
  std::string command;  // external only

  /// "builtin:<id>" or "external:<declared_size>:<command>".
  std::string reference() const;
  friend bool operator==(const SubjectIdentity&, const SubjectIdentity&) = default;
};

struct SolverHandle {
  SubjectIdentity identity;
  SolverFn invoke;
  const std::string& id() const { return identity.id; }
};

struct CheckerHandle {
  SubjectIdentity identity;
  CheckerFn invoke;
  const std::string& id() const { return identity.id; }
};

using SolverPtr = std::shared_ptr<const SolverHandle>;
using CheckerPtr = std::shared_ptr<const CheckerHandle>;

SolverPtr make_solver(std::string id, SolverFn fn);
CheckerPtr make_checker(std::string id, CheckerFn fn);

/// Name -> handle lookup used to resolve subject references in descriptors.
class SubjectRegistry {
 public:
  using ExternalSolverFactory = std::function<SolverPtr(const std::string& command, std::size_t declared_size)>;
  using ExternalCheckerFactory = std::function<CheckerPtr(const std::string& command, std::size_t declared_size)>;

  void add(SolverPtr solver);
  void add(CheckerPtr checker);
  void set_external_factories(ExternalSolverFactory solvers, ExternalCheckerFactory checkers);

  /// Throws RegistryError for unknown names.
  SolverPtr solver(std::string_view name) const;
  CheckerPtr checker(std::string_view name) const;
  bool has_solver(std::string_view name) const;
  bool has_checker(std::string_view name) const;
  std::vector<std::string> solver_names() const;
  std::vector<std::string> checker_names() const;

  /// Resolves a reference() string back to a handle.
  SolverPtr resolve_solver(std::string_view reference) const;
  CheckerPtr resolve_checker(std::string_view reference) const;

 private:
  std::map<std::string, SolverPtr, std::less<>> solvers_;
  std::map<std::string, CheckerPtr, std::less<>> checkers_;
  ExternalSolverFactory external_solver_;
  ExternalCheckerFactory external_checker_;
};

/// Parsed form of a reference() string.
struct ParsedReference {
  SubjectKind kind;
  std::string name;  // builtin id or external command
  std::size_t declared_size = 0;
};
ParsedReference parse_reference(std::string_view reference);

}  // namespace crp
