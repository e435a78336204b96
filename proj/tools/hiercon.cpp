#include <iostream>
#include <string>
#include <vector>

#include "hiercon/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return hiercon::run_command(args, std::cout, std::cerr);
}
