#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "papdiff/cli.hpp"

using namespace papdiff;

namespace {

struct CliResult {
  int code;
  std::string out;
};

CliResult run(const std::vector<std::string>& args) {
  std::stringstream captured;
  std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
  const int code = cli_run(args);
  std::cout.rdbuf(old);
  return {code, captured.str()};
}

}  // namespace

TEST_CASE("eval subcommand") {
  const auto r = run({"eval", "-e", "mult(x1,x2)", "-v", "3,2"});
  CHECK(r.code == 0);
  CHECK(r.out == "6\n");
}

TEST_CASE("grad subcommand in all three modes") {
  const auto fwd = run({"grad", "--mode", "forward", "-e", "relu(x1)", "-v", "0", "-w", "1"});
  CHECK(fwd.code == 0);
  CHECK(fwd.out == "0\n");

  const auto rev =
      run({"grad", "--mode", "reverse", "-e", "mult(x1,x2)", "-v", "3,2", "-u", "1"});
  CHECK(rev.code == 0);
  CHECK(rev.out == "2,3\n");

  const auto sym = run({"grad", "--mode", "symbolic", "-e", "mult(x1,x2)", "-v", "3,2"});
  CHECK(sym.code == 0);
  CHECK(sym.out == "2,3\n");

  const auto sq0 = run({"grad", "--mode", "symbolic", "-e", "sqrt(mult(x1, 0))", "-v", "7"});
  CHECK(sq0.out == "0\n");
}

TEST_CASE("gradcheck subcommand emits JSON and meaningful exit codes") {
  const auto ok = run({"gradcheck", "-e", "relu(x1)", "--lo", "-1", "--hi", "1",
                       "--samples", "1000"});
  CHECK(ok.code == 0);
  const auto j = nlohmann::json::parse(ok.out);
  CHECK(j["samples"] == 1000);
  CHECK(j["agreement_fraction"].get<double>() >= 0.99);

  // every sample sits within the FD step of the kink: the check must fail
  const auto bad = run({"gradcheck", "-e", "relu(x1)", "--lo", "-5e-6", "--hi", "5e-6",
                        "--samples", "200"});
  CHECK(bad.code == 1);
}

TEST_CASE("repr subcommand prints the piece table") {
  const auto table = run({"repr", "-e", "relu(x1)"});
  CHECK(table.code == 0);
  CHECK(table.out.find("pieces: 2") != std::string::npos);
  CHECK(table.out.find("x1 > 0") != std::string::npos);

  const auto json = run({"repr", "-e", "relu(x1)", "--format", "json"});
  CHECK(json.code == 0);
  const auto j = nlohmann::json::parse(json.out);
  CHECK(j["pieces"].size() == 2);
  CHECK(j["input_dim"] == 1);
}

TEST_CASE("corpus subcommand is deterministic") {
  const std::vector<std::string> args = {"corpus", "--seed", "9", "--count", "5",
                                         "--max-depth", "4", "-N", "2"};
  const auto a = run(args);
  const auto b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 5);
}

TEST_CASE("cantor subcommand emits the sample table and probes") {
  const auto table =
      run({"cantor", "--lambda", "0.5", "--depth", "10", "--samples", "20"});
  CHECK(table.code == 0);
  CHECK(table.out.rfind("x,phi_lambda,f,g,g_of_f\n", 0) == 0);
  CHECK(std::count(table.out.begin(), table.out.end(), '\n') == 21);

  const auto again =
      run({"cantor", "--lambda", "0.5", "--depth", "10", "--samples", "20"});
  CHECK(again.out == table.out);  // identical argv and seed, identical bytes

  const auto probe1 = run({"cantor", "probe", "claim1", "--depth", "12", "--k", "5",
                           "--count", "10"});
  CHECK(probe1.code == 0);
  CHECK(probe1.out.rfind("x,x1,x2,q1,q2,k,d_k\n", 0) == 0);

  const auto probe3 = run({"cantor", "probe", "claim3", "--depth", "12", "--count", "30",
                           "--compose-samples", "50"});
  CHECK(probe3.code == 0);
  CHECK(probe3.out.find("worst_compose_diff") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({"nonsense"}).code == 2);
  CHECK(run({"eval", "-e", "relu(x1)"}).code == 2);      // missing -v
  CHECK(run({"eval", "-e", "relu(", "-v", "1"}).code == 2);  // parse error
  CHECK(run({"grad", "--mode", "sideways", "-e", "x1", "-v", "1"}).code == 2);
  CHECK(run({"eval", "-e", "sqrt(x1)", "-v", "-4"}).code == 2);  // domain error
  CHECK(run({}).code == 2);
}
