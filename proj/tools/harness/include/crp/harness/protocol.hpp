#pragma once

// Line-delimited JSON protocol between the harness and external subjects.
//
// harness -> subject  {"type":"problem","role":...,"family":...,"N1":..,"N2":..,"kappa":..,
//                      "eta"|"lambda":..,"p":..,"theta":..,"program":<descriptor text>[,"answer":[[n,d],..]]}
// subject -> harness  {"type":"query","coord":i,"precision":n}      reply {"type":"value","q":"num/den"}
//                     {"type":"need_bits","count":c}                reply {"type":"bits","s":"0101"}
//                     {"type":"answer","vector":[["num","den"],..]} (solvers, final)
//                     {"type":"flag","value":0|1}                   (checkers, final)

#include <chrono>
#include <iosfwd>
#include <optional>
#include <string>
#include <sys/types.h>
#include <vector>

#include "crp/errors.hpp"
#include "crp/harness/certio.hpp"
#include "crp/randomized.hpp"

namespace crp::harness {

struct ProtocolOptions {
  /// Wall-clock guard per record; diagnostics only, never part of fuel or verdicts.
  std::chrono::milliseconds timeout{10000};
};

/// Child process with piped stdin/stdout. The destructor kills and reaps it.
class Subprocess {
 public:
  explicit Subprocess(const std::vector<std::string>& argv);
  ~Subprocess();
  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  void send(const Json& record);
  /// Next record; ProtocolError on EOF, timeout or malformed JSON.
  Json receive(std::chrono::milliseconds timeout);

 private:
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

std::vector<std::string> split_command(const std::string& command);

/// Smallest size s with s >= length of "external:<s>:<command>".
std::size_t auto_declared_size(const std::string& command);

/// Throws ConfigurationError when declared_size is below the reference length.
SolverPtr external_solver(std::string id, const std::string& command, std::size_t declared_size,
                          ProtocolOptions options = {});
CheckerPtr external_checker(std::string id, const std::string& command, std::size_t declared_size,
                            ProtocolOptions options = {});
RandomizedChecker external_randomized_checker(std::string id, const std::string& command,
                                              ProtocolOptions options = {});

/// Registry with the builtins, the coin checker's derandomization and external factories.
SubjectRegistry harness_registry(ProtocolOptions options = {});

Json problem_record(const ProblemContext& ctx, const std::string& program, const char* role,
                    const Vec* answer = nullptr);

/// The harness went away mid-run, which is how it ends runs it no longer needs.
struct ChannelClosed : ProtocolError {
  using ProtocolError::ProtocolError;
};

/// Subject side of the protocol, over a pair of streams.
struct SubjectProblem {
  std::string role;
  ProblemContext context;
  std::string program;
  std::optional<Vec> answer;
};

class SubjectChannel final : public InputAccess {
 public:
  SubjectChannel(std::istream& in, std::ostream& out);

  const SubjectProblem& problem() const { return problem_; }
  std::size_t coordinate_count() const override;
  Rational query(std::size_t i, std::uint64_t n) override;
  const std::string& program() const override { return problem_.program; }

  /// Asks for `count` more bits. When the tape prefix is used up the harness
  /// ends the run instead of replying.
  std::string need_bits(std::size_t count);
  void send_answer(const Vec& v);
  void send_flag(bool flag);
  void send_raw(const Json& record);

 private:
  Json next();

  std::istream& in_;
  std::ostream& out_;
  SubjectProblem problem_;
};

}  // namespace crp::harness
