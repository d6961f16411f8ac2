#include "crp/markov.hpp"

#include <map>
#include <mutex>
#include <sstream>

#include "crp/errors.hpp"

namespace crp {

bool operator==(const SubjectRef& a, const SubjectRef& b) {
  const auto same = [](const auto& x, const auto& y) {
    if (!x || !y) return !x && !y;
    return x->identity == y->identity;
  };
  return a.mode == b.mode && same(a.solver, b.solver) && same(a.checker, b.checker);
}

namespace {

constexpr std::string_view kHeader = "crp-descriptor/1";
constexpr std::size_t kMaxDepth = 4096;

// Thrown inside a run when the pool cannot cover a cost. Deliberately not a
// std::exception so subject code catching std::exception cannot swallow it.
struct FuelExhausted {};

const Family& family_of(const Descriptor& d) {
  return std::visit(
      [](const auto& x) -> const Family& {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, ExactDescriptor>) {
          return x.instance.family();
        } else {
          return x.family;
        }
      },
      d);
}

const Dims& dims_of(const Descriptor& d) {
  return std::visit(
      [](const auto& x) -> const Dims& {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, ExactDescriptor>) {
          return x.instance.dims();
        } else {
          return x.dims;
        }
      },
      d);
}

void append_line(std::string& out, std::string_view key, std::string_view value) {
  out.append(key);
  out.push_back('=');
  out.append(value);
  out.push_back('\n');
}

void append_family(std::string& out, const Family& f, const Dims& dims) {
  // One field per line, in the family record's fixed order.
  std::istringstream fields(serialize_family(f));
  std::string token;
  while (fields >> token) {
    out.append(token);
    out.push_back('\n');
  }
  append_line(out, "N1", std::to_string(dims.n1));
  append_line(out, "N2", std::to_string(dims.n2));
}

const char* mode_name(SubjectMode m) { return m == SubjectMode::Plain ? "plain" : "exitflag"; }

void validate_subject(const SubjectRef& s) {
  if (!s.solver) throw ContractError("diagonal descriptor needs a solver");
  if (s.mode == SubjectMode::ExitFlag && !s.checker) throw ContractError("exit-flag mode needs a checker");
  if (s.mode == SubjectMode::Plain && s.checker) throw ContractError("plain mode takes no checker");
}

std::uint64_t parse_count(const std::string& text, std::string_view what) {
  if (text.empty() || text.size() > 18 || text.find_first_not_of("0123456789") != std::string::npos) {
    throw ParseError("bad " + std::string(what) + " '" + text + "'");
  }
  return std::stoull(text);
}

}  // namespace

std::string serialize_descriptor(const Descriptor& d) {
  std::string out(kHeader);
  out.push_back('\n');
  if (const auto* e = std::get_if<ExactDescriptor>(&d)) {
    append_line(out, "tag", "exact");
    append_family(out, e->instance.family(), e->instance.dims());
    append_line(out, "u1", e->instance.params().u1.canonical());
    append_line(out, "u2", e->instance.params().u2.canonical());
  } else if (const auto* s = std::get_if<ScheduleDescriptor>(&d)) {
    append_line(out, "tag", "schedule");
    append_family(out, s->family, s->dims);
    append_line(out, "j", std::to_string(s->j));
    append_line(out, "t", std::to_string(s->t));
  } else {
    const auto& g = std::get<DiagonalDescriptor>(d);
    append_line(out, "tag", "diagonal");
    append_family(out, g.family, g.dims);
    append_line(out, "mode", mode_name(g.subject.mode));
    append_line(out, "solver", g.subject.solver->identity.reference());
    if (g.subject.checker) append_line(out, "checker", g.subject.checker->identity.reference());
  }
  return out;
}

Descriptor parse_descriptor(std::string_view text, const SubjectRegistry& registry) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw ParseError("descriptor must start with '" + std::string(kHeader) + "'");
  FieldMap fields;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError("malformed descriptor line '" + line + "'");
    auto key = line.substr(0, eq);
    if (fields.count(key)) throw ParseError("duplicate descriptor field '" + key + "'");
    fields.emplace(std::move(key), line.substr(eq + 1));
  }
  const auto family = parse_family(fields);
  const Dims dims{static_cast<std::size_t>(parse_count(require_field(fields, "N1"), "N1")),
                  static_cast<std::size_t>(parse_count(require_field(fields, "N2"), "N2"))};
  const auto& tag = require_field(fields, "tag");
  std::optional<Descriptor> parsed;
  if (tag == "exact") {
    parsed = ExactDescriptor{ProblemInstance(family, dims,
                                        InstanceParams{Rational::parse_canonical(require_field(fields, "u1")),
                                                       Rational::parse_canonical(require_field(fields, "u2"))})};
  } else if (tag == "schedule") {
    const auto j = parse_count(require_field(fields, "j"), "j");
    if (j != 1 && j != 2) throw DomainError("schedule branch j must be 1 or 2");
    const auto t = parse_count(require_field(fields, "t"), "t");
    if (t < 1) throw DomainError("schedule threshold t must be at least 1");
    parsed = ScheduleDescriptor{family, dims, static_cast<int>(j), t};
  } else if (tag == "diagonal") {
    const auto& mode = require_field(fields, "mode");
    SubjectRef subject;
    if (mode == "plain") {
      subject.mode = SubjectMode::Plain;
    } else if (mode == "exitflag") {
      subject.mode = SubjectMode::ExitFlag;
    } else {
      throw ParseError("unknown subject mode '" + mode + "'");
    }
    subject.solver = registry.resolve_solver(require_field(fields, "solver"));
    if (const auto it = fields.find("checker"); it != fields.end()) subject.checker = registry.resolve_checker(it->second);
    parsed = DiagonalDescriptor{family, dims, subject};
  } else {
    throw ParseError("unknown descriptor tag '" + tag + "'");
  }
  if (serialize_descriptor(*parsed) != text) throw ParseError("descriptor is not in canonical form");
  return std::move(*parsed);
}

std::string describe(const RunOutcome& outcome) {
  if (std::holds_alternative<RunAborted>(outcome)) return "Aborted";
  const auto& c = std::get<RunComplete>(outcome);
  return "Complete{verdict " + std::to_string(c.verdict) + ", fuel " + std::to_string(c.fuel) + "}";
}

struct MarkovInput::State {
  Descriptor descriptor;
  std::string text;
  ProblemInstance iota0;
  Vec y2;
  std::uint64_t max_fuel = 0;  // 0: no guard
  mutable std::mutex mu;
  std::map<FuelPool, RunOutcome> cache;

  State(Descriptor d, ProblemInstance base, Vec anchor)
      : descriptor(std::move(d)), iota0(std::move(base)), y2(std::move(anchor)) {}

  // f_i(iota^j_t) without building the instance: only u1 (j=2) or u2 (j=1) moves.
  Rational anchored_coord(int j, std::uint64_t t, std::size_t i) const {
    if ((j == 2 && i == 1) || (j == 1 && i == 2)) return Rational(1, 2) - dyadic(2 * t);
    return iota0.coordinate(i);
  }

  RunOutcome run(FuelPool pool, std::size_t depth, bool use_cache);
};

namespace {

class Meter {
 public:
  Meter(FuelPool pool, std::uint64_t guard) : remaining_(pool), guard_(guard) {}

  void pay(std::uint64_t cost) {
    if (remaining_) {
      if (*remaining_ < cost) throw FuelExhausted{};
      *remaining_ -= cost;
    }
    used_ += cost;
    if (guard_ != 0 && used_ > guard_) {
      throw BudgetExhausted("fuel guard of " + std::to_string(guard_) + " exceeded by an uncapped run");
    }
  }
  const FuelPool& remaining() const { return remaining_; }
  std::uint64_t used() const { return used_; }

 private:
  FuelPool remaining_;
  std::uint64_t guard_;
  std::uint64_t used_ = 0;
};

}  // namespace

namespace {

class MeteredAccess : public InputAccess {
 public:
  MeteredAccess(MarkovInput::State& state, const MarkovInput& owner, Meter& meter, std::size_t depth)
      : state_(state), owner_(owner), meter_(meter), depth_(depth) {}

  std::size_t coordinate_count() const override { return owner_.coordinate_count(); }
  const std::string& program() const override { return owner_.text(); }

  Rational query(std::size_t i, std::uint64_t n) override;

 private:
  MarkovInput::State& state_;
  const MarkovInput& owner_;
  Meter& meter_;
  std::size_t depth_;
};

}  // namespace

MarkovInput::MarkovInput(Descriptor descriptor) {
  if (auto* s = std::get_if<ScheduleDescriptor>(&descriptor)) {
    if (s->j != 1 && s->j != 2) throw DomainError("schedule branch j must be 1 or 2");
    if (s->t < 1) throw DomainError("schedule threshold t must be at least 1");
  }
  if (auto* g = std::get_if<DiagonalDescriptor>(&descriptor)) validate_subject(g->subject);
  const Family& f = family_of(descriptor);
  const Dims& dims = dims_of(descriptor);
  ProblemInstance base(f, dims, InstanceParams{});
  Vec y2 = anchor_sets(f, dims).y2;
  state_ = std::make_shared<State>(std::move(descriptor), std::move(base), std::move(y2));
  state_->text = serialize_descriptor(state_->descriptor);
}

const Descriptor& MarkovInput::descriptor() const { return state_->descriptor; }
const Family& MarkovInput::family() const { return family_of(state_->descriptor); }
const Dims& MarkovInput::dims() const { return dims_of(state_->descriptor); }
const std::string& MarkovInput::text() const { return state_->text; }
void MarkovInput::set_fuel_guard(std::uint64_t max_fuel) { state_->max_fuel = max_fuel; }

Rational MarkovInput::eval_coord(std::size_t i, std::uint64_t n) const {
  if (i < 1 || i > coordinate_count()) {
    throw DimensionError("coordinate " + std::to_string(i) + " outside 1.." + std::to_string(coordinate_count()));
  }
  if (n < 1) throw DomainError("precision n must be at least 1");
  const auto& d = state_->descriptor;
  if (const auto* e = std::get_if<ExactDescriptor>(&d)) return e->instance.coordinate(i);
  if (const auto* s = std::get_if<ScheduleDescriptor>(&d)) {
    if (n < s->t) return state_->iota0.coordinate(i);
    return state_->anchored_coord(s->j, s->t, i);
  }
  const auto outcome = metered_run(n);
  if (const auto* c = std::get_if<RunComplete>(&outcome); c && c->verdict != 3) {
    return state_->anchored_coord(c->verdict, c->fuel, i);
  }
  return state_->iota0.coordinate(i);
}

RunOutcome MarkovInput::metered_run(FuelPool pool) const {
  if (!is_diagonal()) throw NotApplicable("metered runs exist only for diagonal inputs");
  return state_->run(pool, 0, true);
}

RunOutcome MarkovInput::fresh_run(FuelPool pool) const {
  if (!is_diagonal()) throw NotApplicable("metered runs exist only for diagonal inputs");
  return state_->run(pool, 0, false);
}

RunOutcome MarkovInput::State::run(FuelPool pool, std::size_t depth, bool use_cache) {
  if (use_cache) {
    std::lock_guard lock(mu);
    if (const auto it = cache.find(pool); it != cache.end()) return it->second;
  }
  if (depth > kMaxDepth) throw BudgetExhausted("nested replay depth exceeded");
  const auto& g = std::get<DiagonalDescriptor>(descriptor);
  // A non-owning handle onto this state so subjects can read program text.
  MarkovInput self(std::shared_ptr<State>(std::shared_ptr<State>{}, this));
  Meter meter(pool, max_fuel);
  RunOutcome outcome = RunAborted{};
  try {
    meter.pay(1);
    MeteredAccess access(*this, self, meter, depth);
    const ProblemContext ctx{g.family, g.dims};
    RunComplete done;
    done.answer = g.subject.solver->invoke(access, ctx);
    if (done.answer.size() != g.dims.n1) {
      throw ContractError("solver '" + g.subject.solver->id() + "' answered a vector of length " +
                          std::to_string(done.answer.size()) + ", expected " + std::to_string(g.dims.n1));
    }
    const bool near_y2 = dist_point(done.answer, y2, g.family.norm).within(g.family.kappa);
    if (g.subject.mode == SubjectMode::ExitFlag) {
      done.flag = g.subject.checker->invoke(access, ctx, done.answer);
      done.verdict = *done.flag ? (near_y2 ? 1 : 2) : 3;
    } else {
      done.verdict = near_y2 ? 1 : 2;
    }
    done.fuel = meter.used();
    outcome = std::move(done);
  } catch (const FuelExhausted&) {
    outcome = RunAborted{};
  }
  if (use_cache) {
    std::lock_guard lock(mu);
    cache.emplace(pool, outcome);
  }
  return outcome;
}

namespace {

Rational MeteredAccess::query(std::size_t i, std::uint64_t n) {
  if (i < 1 || i > coordinate_count()) {
    throw DimensionError("query for coordinate " + std::to_string(i) + " outside 1.." +
                         std::to_string(coordinate_count()));
  }
  if (n < 1) throw DomainError("query precision must be at least 1");
  meter_.pay(1);
  const std::uint64_t child_pool = meter_.remaining() ? std::min(n, *meter_.remaining()) : n;
  const auto child = state_.run(child_pool, depth_ + 1, true);
  if (const auto* c = std::get_if<RunComplete>(&child)) {
    meter_.pay(c->fuel);
    if (c->verdict == 3) return state_.iota0.coordinate(i);
    return state_.anchored_coord(c->verdict, c->fuel, i);
  }
  meter_.pay(child_pool);
  if (child_pool == n) return state_.iota0.coordinate(i);
  throw FuelExhausted{};
}

}  // namespace

// Private constructor used for the non-owning self handle.
MarkovInput::MarkovInput(std::shared_ptr<State> state) : state_(std::move(state)) {}

ProblemInstance MarkovInput::ground_truth() const {
  const auto& d = state_->descriptor;
  if (const auto* e = std::get_if<ExactDescriptor>(&d)) return e->instance;
  if (const auto* s = std::get_if<ScheduleDescriptor>(&d)) return iota_anchor(s->family, s->dims, s->j, s->t);
  const auto outcome = metered_run(std::nullopt);
  const auto* c = std::get_if<RunComplete>(&outcome);
  if (!c) throw EngineBugError("an uncapped run aborted");
  if (c->verdict == 3) return state_->iota0;
  return iota_anchor(family(), dims(), c->verdict, c->fuel);
}

Rational eval_coord(const MarkovInput& input, std::size_t i, std::uint64_t n) { return input.eval_coord(i, n); }
RunOutcome metered_run(const MarkovInput& input, FuelPool pool) { return input.metered_run(pool); }
ProblemInstance ground_truth(const MarkovInput& input) { return input.ground_truth(); }
std::size_t descriptor_bytes(const MarkovInput& input) { return input.text().size(); }

std::size_t subject_bytes(const DiagonalDescriptor& d) {
  std::size_t bytes = d.subject.solver->identity.reference().size();
  if (d.subject.checker) bytes += d.subject.checker->identity.reference().size();
  return bytes;
}

std::size_t decimal_digits(std::uint64_t value) { return std::to_string(value).size(); }

std::size_t engine_constant(const DiagonalDescriptor& d) {
  return serialize_descriptor(d).size() - subject_bytes(d) - decimal_digits(d.dims.n1);
}

MarkovInput make_exact(const ProblemInstance& inst) { return MarkovInput(ExactDescriptor{inst}); }

MarkovInput make_schedule(const Family& family, const Dims& dims, int j, std::uint64_t t) {
  return MarkovInput(ScheduleDescriptor{family, dims, j, t});
}

MarkovInput make_diagonal(const Family& family, const Dims& dims, SolverPtr solver) {
  return MarkovInput(DiagonalDescriptor{family, dims, SubjectRef{std::move(solver), nullptr, SubjectMode::Plain}});
}

MarkovInput make_exitflag_diagonal(const Family& family, const Dims& dims, SolverPtr solver, CheckerPtr checker) {
  return MarkovInput(
      DiagonalDescriptor{family, dims, SubjectRef{std::move(solver), std::move(checker), SubjectMode::ExitFlag}});
}

}  // namespace crp
