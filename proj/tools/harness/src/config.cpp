#include "crp/harness/config.hpp"

#include <fstream>
#include <sstream>

#include "crp/errors.hpp"

namespace crp::harness {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::uint64_t parse_count(const std::string& key, const std::string& value) {
  if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos || value.size() > 18) {
    throw ConfigurationError("'" + key + "' needs a non-negative integer, got '" + value + "'");
  }
  return std::stoull(value);
}

Rational parse_rational(const std::string& key, const std::string& value) {
  try {
    return Rational::parse(value);
  } catch (const Error&) {
    throw ConfigurationError("'" + key + "' needs a rational num/den, got '" + value + "'");
  }
}

}  // namespace

Family HarnessConfig::family_of(ProblemKind kind) const {
  Family f = family;
  f.kind = kind;
  f.eta = eta;
  f.lambda = lambda;
  require_valid(f);
  return f;
}

HarnessConfig parse_config(std::string_view text) {
  HarnessConfig cfg;
  std::map<std::string, std::string, std::less<>> seen;
  std::istringstream in{std::string(text)};
  std::size_t lineno = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    const auto hash = raw.find('#');
    const auto line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigurationError("line " + std::to_string(lineno) + ": expected key = value");
    const auto key = trim(std::string_view(line).substr(0, eq));
    const auto value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigurationError("line " + std::to_string(lineno) + ": empty key or value");
    if (!seen.emplace(key, value).second) throw ConfigurationError("duplicate key '" + key + "'");
  }

  std::map<std::string, SubjectEntry> subjects;
  for (const auto& [key, value] : seen) {
    if (key == "family") {
      cfg.family.kind = parse_problem_kind(value);
    } else if (key == "kappa") {
      cfg.family.kappa = parse_rational(key, value);
    } else if (key == "eta") {
      cfg.eta = parse_rational(key, value);
    } else if (key == "lambda") {
      cfg.lambda = parse_rational(key, value);
    } else if (key == "theta") {
      cfg.family.theta = parse_rational(key, value);
    } else if (key == "p") {
      cfg.family.norm = PNorm::parse(value);
    } else if (key == "N1") {
      cfg.dims.n1 = parse_count(key, value);
    } else if (key == "N2") {
      cfg.dims.n2 = parse_count(key, value);
    } else if (key == "alpha") {
      cfg.alpha = parse_rational(key, value);
    } else if (key == "max_fuel") {
      cfg.max_fuel = parse_count(key, value);
    } else if (key == "max_depth") {
      cfg.max_depth = parse_count(key, value);
    } else if (key == "timeout_ms") {
      cfg.timeout = std::chrono::milliseconds(parse_count(key, value));
    } else if (key == "store") {
      cfg.store = value;
    } else if (key == "seed") {
      cfg.seed = parse_count(key, value);
    } else {
      const auto dot = key.find('.');
      const auto role = key.substr(0, dot);
      if (dot == std::string::npos || (role != "solver" && role != "checker" && role != "randomized")) {
        throw ConfigurationError("unknown config key '" + key + "'");
      }
      auto rest = key.substr(dot + 1);
      const bool size_key = rest.size() > 5 && rest.substr(rest.size() - 5) == ".size";
      if (size_key) rest.resize(rest.size() - 5);
      if (rest.empty() || rest.find_first_of(":=. \t") != std::string::npos) {
        throw ConfigurationError("bad subject name in '" + key + "'");
      }
      auto& entry = subjects[role + "." + rest];
      entry.role = role;
      entry.name = rest;
      if (size_key) {
        entry.declared_size = parse_count(key, value);
      } else {
        entry.command = value;
      }
    }
  }
  for (auto& [key, entry] : subjects) {
    if (entry.command.empty()) throw ConfigurationError("'" + key + ".size' without a command");
    if (entry.declared_size == 0) entry.declared_size = auto_declared_size(entry.command);
    cfg.subjects.push_back(entry);
  }

  cfg.family.eta = cfg.eta;
  cfg.family.lambda = cfg.lambda;
  for (const auto kind : {ProblemKind::LP, ProblemKind::BP, ProblemKind::LASSO}) cfg.family_of(kind);
  if (cfg.alpha.sign() < 0) throw ConfigurationError("alpha must be non-negative");
  if (cfg.dims.n1 < 2 || cfg.dims.n2 < 1 || cfg.dims.n1 < cfg.dims.n2 + 1) {
    throw ConfigurationError("dimensions need N1 >= 2, N2 >= 1 and N1 >= N2 + 1");
  }
  return cfg;
}

HarnessConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

const RandomizedChecker& Subjects::randomized_checker(std::string_view name) const {
  const auto it = randomized.find(name);
  if (it == randomized.end()) throw RegistryError("unknown randomized checker '" + std::string(name) + "'");
  return it->second;
}

void Subjects::ensure_derandomized(std::string_view checker_id) const {
  if (registry->has_checker(checker_id)) return;
  const auto name = parse_derandomized_id(checker_id);
  if (!name) return;
  const auto& rc = randomized_checker(name->checker_id);
  registry->add(derandomized_checker(rc, bernoulli_premeasure(Rational(1, 2)), name->p, name->y0));
}

Subjects build_subjects(const HarnessConfig& config) {
  Subjects out{std::make_shared<SubjectRegistry>(harness_registry(config.protocol_options())), {}};
  out.randomized.emplace("Coin", coin_checker());
  for (const auto& e : config.subjects) {
    const bool clash = out.registry->has_solver(e.name) || out.registry->has_checker(e.name) ||
                       out.randomized.count(e.name) != 0;
    if (clash) throw ConfigurationError("subject name '" + e.name + "' is already registered");
    if (e.role == "solver") {
      out.registry->add(external_solver(e.name, e.command, e.declared_size, config.protocol_options()));
    } else if (e.role == "checker") {
      out.registry->add(external_checker(e.name, e.command, e.declared_size, config.protocol_options()));
    } else {
      out.randomized.emplace(e.name, external_randomized_checker(e.name, e.command, config.protocol_options()));
    }
  }
  return out;
}

}  // namespace crp::harness
