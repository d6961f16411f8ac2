#include "crp/subject.hpp"

#include "crp/errors.hpp"

namespace crp {

std::string SubjectIdentity::reference() const {
  if (kind == SubjectKind::Builtin) return "builtin:" + id;
  return "external:" + std::to_string(declared_size) + ":" + command;
}

namespace {

SubjectIdentity builtin_identity(std::string id) {
  if (id.empty() || id.find_first_of(" \t\r\n:=") != std::string::npos) {
    throw RegistryError("invalid subject name '" + id + "'");
  }
  SubjectIdentity identity{std::move(id), SubjectKind::Builtin, 0, {}};
  identity.declared_size = identity.reference().size();
  return identity;
}

}  // namespace

SolverPtr make_solver(std::string id, SolverFn fn) {
  return std::make_shared<const SolverHandle>(SolverHandle{builtin_identity(std::move(id)), std::move(fn)});
}

CheckerPtr make_checker(std::string id, CheckerFn fn) {
  return std::make_shared<const CheckerHandle>(CheckerHandle{builtin_identity(std::move(id)), std::move(fn)});
}

void SubjectRegistry::add(SolverPtr solver) {
  const auto name = solver->id();
  solvers_[name] = std::move(solver);
}

void SubjectRegistry::add(CheckerPtr checker) {
  const auto name = checker->id();
  checkers_[name] = std::move(checker);
}

void SubjectRegistry::set_external_factories(ExternalSolverFactory solvers, ExternalCheckerFactory checkers) {
  external_solver_ = std::move(solvers);
  external_checker_ = std::move(checkers);
}

SolverPtr SubjectRegistry::solver(std::string_view name) const {
  const auto it = solvers_.find(name);
  if (it == solvers_.end()) throw RegistryError("unknown solver '" + std::string(name) + "'");
  return it->second;
}

CheckerPtr SubjectRegistry::checker(std::string_view name) const {
  const auto it = checkers_.find(name);
  if (it == checkers_.end()) throw RegistryError("unknown checker '" + std::string(name) + "'");
  return it->second;
}

bool SubjectRegistry::has_solver(std::string_view name) const { return solvers_.find(name) != solvers_.end(); }
bool SubjectRegistry::has_checker(std::string_view name) const { return checkers_.find(name) != checkers_.end(); }

std::vector<std::string> SubjectRegistry::solver_names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : solvers_) out.push_back(name);
  return out;
}

std::vector<std::string> SubjectRegistry::checker_names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : checkers_) out.push_back(name);
  return out;
}

ParsedReference parse_reference(std::string_view reference) {
  constexpr std::string_view kBuiltin = "builtin:";
  constexpr std::string_view kExternal = "external:";
  if (reference.substr(0, kBuiltin.size()) == kBuiltin) {
    auto name = reference.substr(kBuiltin.size());
    if (name.empty()) throw ParseError("empty builtin subject name");
    return {SubjectKind::Builtin, std::string(name), 0};
  }
  if (reference.substr(0, kExternal.size()) == kExternal) {
    const auto rest = reference.substr(kExternal.size());
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos || colon == 0) throw ParseError("external reference needs <size>:<command>");
    const auto size_text = rest.substr(0, colon);
    if (size_text.find_first_not_of("0123456789") != std::string_view::npos || size_text.size() > 18) {
      throw ParseError("bad declared size in '" + std::string(reference) + "'");
    }
    const auto command = rest.substr(colon + 1);
    if (command.empty()) throw ParseError("empty external command");
    return {SubjectKind::External, std::string(command), static_cast<std::size_t>(std::stoull(std::string(size_text)))};
  }
  throw ParseError("unknown subject reference '" + std::string(reference) + "'");
}

SolverPtr SubjectRegistry::resolve_solver(std::string_view reference) const {
  const auto ref = parse_reference(reference);
  if (ref.kind == SubjectKind::Builtin) return solver(ref.name);
  if (!external_solver_) throw RegistryError("external solvers are not enabled in this context");
  return external_solver_(ref.name, ref.declared_size);
}

CheckerPtr SubjectRegistry::resolve_checker(std::string_view reference) const {
  const auto ref = parse_reference(reference);
  if (ref.kind == SubjectKind::Builtin) return checker(ref.name);
  if (!external_checker_) throw RegistryError("external checkers are not enabled in this context");
  return external_checker_(ref.name, ref.declared_size);
}

}  // namespace crp
