#include <iostream>
#include <string>
#include <vector>

#include "dgdtrack/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dgdtrack::run_cli(args, std::cout, std::cerr);
}
