#include <iostream>
#include <string>
#include <vector>

#include "veritas/cli/commands.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return veritas::cli::run(args, std::cout, std::cerr);
}
