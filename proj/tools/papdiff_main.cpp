#include "papdiff/cli.hpp"

int main(int argc, char** argv) {
  return papdiff::cli_run(std::vector<std::string>(argv + 1, argv + argc));
}
