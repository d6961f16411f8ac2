#pragma once

// Harness configuration: "key = value" lines, '#' comments, rationals as num/den.
//
//   family = LP            kappa = 1/10     eta = 1/20     lambda = 1/20
//   p = inf                theta = 1/4      N1 = 2         N2 = 1
//   alpha = 1/20           max_fuel = 0     max_depth = 20 timeout_ms = 10000
//   store = certificates   seed = 1
//   solver.<name> = <command>        (also checker.<name>, randomized.<name>)
//   solver.<name>.size = <bytes>     (optional declared size, default: smallest valid)

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "crp/adversary.hpp"
#include "crp/harness/protocol.hpp"
#include "crp/randomized.hpp"

namespace crp::harness {

struct SubjectEntry {
  std::string role;  // solver, checker or randomized
  std::string name;
  std::string command;
  std::size_t declared_size = 0;
};

struct HarnessConfig {
  Family family;  // the selected family, validated
  Rational eta{1, 20};
  Rational lambda{1, 20};
  Dims dims;
  Rational alpha{1, 20};
  std::uint64_t max_fuel = 0;
  std::uint64_t max_depth = 20;
  std::chrono::milliseconds timeout{10000};
  std::string store = "certificates";
  std::uint64_t seed = 1;
  std::vector<SubjectEntry> subjects;

  /// Same kappa, theta and norm with the configured eta/lambda; validated.
  Family family_of(ProblemKind kind) const;
  AttackOptions attack_options() const { return {alpha, max_fuel}; }
  ProtocolOptions protocol_options() const { return {timeout}; }
};

/// Validates every family at load. Throws ConfigurationError or ParseError.
HarnessConfig parse_config(std::string_view text);
HarnessConfig load_config(const std::filesystem::path& path);

struct Subjects {
  std::shared_ptr<SubjectRegistry> registry;
  std::map<std::string, RandomizedChecker, std::less<>> randomized;

  /// Registered solver or checker by name; RegistryError if unknown.
  const RandomizedChecker& randomized_checker(std::string_view name) const;
  /// Adds the derandomized checker named by a "Derand(...)" id when it is missing.
  void ensure_derandomized(std::string_view checker_id) const;
};

Subjects build_subjects(const HarnessConfig& config);

}  // namespace crp::harness
