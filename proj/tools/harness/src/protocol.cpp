#include "crp/harness/protocol.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <istream>
#include <ostream>
#include <poll.h>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "crp/builtins.hpp"
#include "crp/errors.hpp"

namespace crp::harness {

namespace {

void ignore_sigpipe() {
  static const bool once = [] {
    std::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)once;
}

std::string sys_error(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

Json answer_vector(const Vec& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back({x.numerator().get_str(), x.denominator().get_str()});
  return out;
}

// Each entry must already be in lowest terms with a positive denominator.
Vec parse_answer_vector(const Json& j) {
  if (!j.is_array()) throw ProtocolError("answer vector must be an array");
  Vec v;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
      throw ProtocolError("answer entries must be [\"num\",\"den\"] pairs");
    }
    const auto text = e[0].get<std::string>() + "/" + e[1].get<std::string>();
    if (!is_canonical(text)) throw ProtocolError("non-canonical rational " + text);
    v.push_back(Rational::parse_canonical(text));
  }
  return v;
}

std::string record_type(const Json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw ProtocolError("record without a string 'type': " + j.dump());
  }
  return j["type"].get<std::string>();
}

template <class T>
T integer_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) throw ProtocolError(std::string("record needs integer '") + key + "'");
  const auto v = j[key].get<long long>();
  if (v < 0) throw ProtocolError(std::string("negative '") + key + "'");
  return static_cast<T>(v);
}

void answer_query(Subprocess& child, InputAccess& access, const Json& msg) {
  const auto i = integer_field<std::size_t>(msg, "coord");
  const auto n = integer_field<std::uint64_t>(msg, "precision");
  if (i < 1 || i > access.coordinate_count()) {
    throw ProtocolError("query for coordinate " + std::to_string(i) + " outside 1.." +
                        std::to_string(access.coordinate_count()));
  }
  if (n < 1) throw ProtocolError("query precision must be at least 1");
  child.send({{"type", "value"}, {"q", access.query(i, n).canonical()}});
}

SubjectIdentity external_identity(std::string id, const std::string& command, std::size_t declared_size) {
  if (split_command(command).empty()) throw ConfigurationError("empty external command");
  if (command.find_first_of("\r\n\t=") != std::string::npos) {
    throw ConfigurationError("external command may not contain tabs, newlines or '='");
  }
  SubjectIdentity identity{std::move(id), SubjectKind::External, declared_size, command};
  if (declared_size < identity.reference().size()) {
    throw ConfigurationError("declared size " + std::to_string(declared_size) + " is below the reference length " +
                             std::to_string(identity.reference().size()));
  }
  return identity;
}

}  // namespace

Subprocess::Subprocess(const std::vector<std::string>& argv) {
  if (argv.empty()) throw ConfigurationError("empty subprocess command");
  ignore_sigpipe();
  int in_pipe[2];
  int out_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0) throw ProtocolError(sys_error("pipe"));
  if (pipe2(out_pipe, O_CLOEXEC) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw ProtocolError(sys_error("pipe"));
  }
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  pid_ = fork();
  if (pid_ < 0) throw ProtocolError(sys_error("fork"));
  if (pid_ == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    execvp(args[0], args.data());
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

Subprocess::~Subprocess() {
  if (pid_ > 0) kill(pid_, SIGKILL);
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    while (waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
    }
  }
}

void Subprocess::send(const Json& record) {
  const auto line = record.dump() + "\n";
  std::size_t off = 0;
  while (off < line.size()) {
    const auto n = write(to_child_, line.data() + off, line.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(sys_error("write to subject"));
    }
    off += static_cast<std::size_t>(n);
  }
}

Json Subprocess::receive(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      const auto line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      try {
        return Json::parse(line);
      } catch (const Json::exception&) {
        throw ProtocolError("malformed record from subject: '" + line.substr(0, 80) + "'");
      }
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw ProtocolError("subject timed out after " + std::to_string(timeout.count()) + " ms");
    pollfd pfd{from_child_, POLLIN, 0};
    const int rc = poll(&pfd, 1, static_cast<int>(left.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(sys_error("poll"));
    }
    if (rc == 0) continue;
    char chunk[4096];
    const auto n = read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(sys_error("read from subject"));
    }
    if (n == 0) throw ProtocolError("subject closed its output before finishing");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::vector<std::string> split_command(const std::string& command) {
  std::istringstream in(command);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::size_t auto_declared_size(const std::string& command) {
  std::size_t s = 1;
  while (s < std::string("external:" + std::to_string(s) + ":" + command).size()) ++s;
  return s;
}

Json problem_record(const ProblemContext& ctx, const std::string& program, const char* role, const Vec* answer) {
  const auto& f = ctx.family;
  Json j{{"type", "problem"}, {"role", role},           {"family", to_string(f.kind)},
         {"N1", ctx.dims.n1}, {"N2", ctx.dims.n2},      {"kappa", f.kappa.canonical()},
         {"p", f.norm.str()}, {"theta", f.theta.canonical()}, {"program", program}};
  if (f.kind == ProblemKind::BP) j["eta"] = f.eta.canonical();
  if (f.kind == ProblemKind::LASSO) j["lambda"] = f.lambda.canonical();
  if (answer) j["answer"] = answer_vector(*answer);
  return j;
}

SolverPtr external_solver(std::string id, const std::string& command, std::size_t declared_size,
                          ProtocolOptions options) {
  auto identity = external_identity(std::move(id), command, declared_size);
  SolverFn fn = [argv = split_command(command), options](InputAccess& access, const ProblemContext& ctx) {
    Subprocess child(argv);
    child.send(problem_record(ctx, access.program(), "solver"));
    for (;;) {
      const auto msg = child.receive(options.timeout);
      const auto type = record_type(msg);
      if (type == "query") {
        answer_query(child, access, msg);
      } else if (type == "answer") {
        if (!msg.contains("vector")) throw ProtocolError("answer record lacks 'vector'");
        return parse_answer_vector(msg["vector"]);
      } else {
        throw ProtocolError("unexpected '" + type + "' record from a solver");
      }
    }
  };
  return std::make_shared<const SolverHandle>(SolverHandle{std::move(identity), std::move(fn)});
}

CheckerPtr external_checker(std::string id, const std::string& command, std::size_t declared_size,
                            ProtocolOptions options) {
  auto identity = external_identity(std::move(id), command, declared_size);
  CheckerFn fn = [argv = split_command(command), options](InputAccess& access, const ProblemContext& ctx,
                                                          const Vec& answer) {
    Subprocess child(argv);
    child.send(problem_record(ctx, access.program(), "checker", &answer));
    for (;;) {
      const auto msg = child.receive(options.timeout);
      const auto type = record_type(msg);
      if (type == "query") {
        answer_query(child, access, msg);
      } else if (type == "flag") {
        const auto v = integer_field<int>(msg, "value");
        if (v > 1) throw ProtocolError("flag must be 0 or 1");
        return v == 1;
      } else {
        throw ProtocolError("unexpected '" + type + "' record from a checker");
      }
    }
  };
  return std::make_shared<const CheckerHandle>(CheckerHandle{std::move(identity), std::move(fn)});
}

RandomizedChecker external_randomized_checker(std::string id, const std::string& command, ProtocolOptions options) {
  if (split_command(command).empty()) throw ConfigurationError("empty external command");
  return {std::move(id), [argv = split_command(command), options](InputAccess& access, const ProblemContext& ctx,
                                                                  const Vec& answer,
                                                                  std::string_view bits) -> std::optional<bool> {
            Subprocess child(argv);
            child.send(problem_record(ctx, access.program(), "randomized", &answer));
            std::size_t used = 0;
            for (;;) {
              const auto msg = child.receive(options.timeout);
              const auto type = record_type(msg);
              if (type == "query") {
                answer_query(child, access, msg);
              } else if (type == "need_bits") {
                const auto c = integer_field<std::size_t>(msg, "count");
                if (c == 0) throw ProtocolError("need_bits count must be positive");
                if (used + c > bits.size()) return std::nullopt;
                child.send({{"type", "bits"}, {"s", std::string(bits.substr(used, c))}});
                used += c;
              } else if (type == "flag") {
                const auto v = integer_field<int>(msg, "value");
                if (v > 1) throw ProtocolError("flag must be 0 or 1");
                return v == 1;
              } else {
                throw ProtocolError("unexpected '" + type + "' record from a randomized checker");
              }
            }
          }};
}

SubjectRegistry harness_registry(ProtocolOptions options) {
  auto registry = builtin_registry();
  registry.add(derandomized_checker(coin_checker(), bernoulli_premeasure(Rational(1, 2)), Rational(3, 4), true));
  registry.set_external_factories(
      [options](const std::string& command, std::size_t size) { return external_solver(command, command, size, options); },
      [options](const std::string& command, std::size_t size) {
        return external_checker(command, command, size, options);
      });
  return registry;
}

SubjectChannel::SubjectChannel(std::istream& in, std::ostream& out) : in_(in), out_(out) {
  const auto j = next();
  if (record_type(j) != "problem") throw ProtocolError("expected a problem record first");
  try {
    FieldMap fields{{"family", j.at("family").get<std::string>()},
                    {"kappa", j.at("kappa").get<std::string>()},
                    {"p", j.at("p").get<std::string>()},
                    {"theta", j.at("theta").get<std::string>()}};
    if (j.contains("eta")) fields["eta"] = j["eta"].get<std::string>();
    if (j.contains("lambda")) fields["lambda"] = j["lambda"].get<std::string>();
    problem_.role = j.at("role").get<std::string>();
    problem_.context = {parse_family(fields), Dims{j.at("N1").get<std::size_t>(), j.at("N2").get<std::size_t>()}};
    problem_.program = j.at("program").get<std::string>();
    if (j.contains("answer")) problem_.answer = parse_answer_vector(j["answer"]);
  } catch (const Json::exception& e) {
    throw ProtocolError(std::string("malformed problem record: ") + e.what());
  }
}

Json SubjectChannel::next() {
  std::string line;
  if (!std::getline(in_, line)) throw ChannelClosed("harness closed the channel");
  try {
    return Json::parse(line);
  } catch (const Json::exception&) {
    throw ProtocolError("malformed record from harness");
  }
}

std::size_t SubjectChannel::coordinate_count() const {
  const auto& d = problem_.context.dims;
  return d.n2 + d.n2 * d.n1;
}

Rational SubjectChannel::query(std::size_t i, std::uint64_t n) {
  send_raw({{"type", "query"}, {"coord", i}, {"precision", n}});
  const auto j = next();
  if (record_type(j) != "value" || !j.contains("q") || !j["q"].is_string()) throw ProtocolError("expected a value");
  return Rational::parse_canonical(j["q"].get<std::string>());
}

std::string SubjectChannel::need_bits(std::size_t count) {
  send_raw({{"type", "need_bits"}, {"count", count}});
  const auto j = next();
  if (record_type(j) != "bits" || !j.contains("s")) throw ProtocolError("expected bits");
  return j["s"].get<std::string>();
}

void SubjectChannel::send_answer(const Vec& v) { send_raw({{"type", "answer"}, {"vector", answer_vector(v)}}); }
void SubjectChannel::send_flag(bool flag) { send_raw({{"type", "flag"}, {"value", flag ? 1 : 0}}); }

void SubjectChannel::send_raw(const Json& record) { out_ << record.dump() << '\n' << std::flush; }

}  // namespace crp::harness
