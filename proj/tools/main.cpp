#include <iostream>
#include <string>
#include <vector>

#include "debate_forum/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return debate_forum::cli::run_cli(args, std::cout, std::cerr);
}
