// External subject speaking the harness wire protocol on stdin/stdout.
//
//   crp_subject <name>
//
// <name> is any builtin solver or checker, the randomized "Coin" checker, or
// one of the misbehaving test subjects: BadRational, BadCoord, Garbage, Silent.

#include <chrono>
#include <iostream>
#include <thread>

#include "crp/builtins.hpp"
#include "crp/errors.hpp"
#include "crp/harness/protocol.hpp"

using namespace crp;
using namespace crp::harness;

namespace {

int run(const std::string& name) {
  SubjectChannel channel(std::cin, std::cout);
  const auto& problem = channel.problem();

  if (name == "BadRational") {
    channel.send_raw({{"type", "answer"}, {"vector", Json::array({{"2", "4"}, {"0", "1"}})}});
    return 0;
  }
  if (name == "BadCoord") {
    channel.query(99, 1);
    return 0;
  }
  if (name == "Garbage") {
    std::cout << "this is not a record\n" << std::flush;
    return 0;
  }
  if (name == "Silent") {
    std::this_thread::sleep_for(std::chrono::hours(1));
    return 0;
  }
  if (name == "Coin") {
    const auto step = coin_checker().step;
    if (!problem.answer) throw ProtocolError("randomized checker needs an answer");
    std::string bits;
    for (;;) {
      if (auto flag = step(channel, problem.context, *problem.answer, bits)) {
        channel.send_flag(*flag);
        return 0;
      }
      bits += channel.need_bits(1);
    }
  }

  const auto registry = builtin_registry();
  if (problem.role == "solver") {
    channel.send_answer(registry.solver(name)->invoke(channel, problem.context));
    return 0;
  }
  if (problem.role == "checker") {
    if (!problem.answer) throw ProtocolError("checker problem record lacks an answer");
    channel.send_flag(registry.checker(name)->invoke(channel, problem.context, *problem.answer));
    return 0;
  }
  throw ProtocolError("unsupported role '" + problem.role + "'");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: crp_subject <name>\n";
    return 2;
  }
  try {
    return run(argv[1]);
  } catch (const ChannelClosed&) {
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "crp_subject: " << e.what() << '\n';
    return 1;
  }
}
