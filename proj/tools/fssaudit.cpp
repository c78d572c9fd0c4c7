#include <iostream>
#include <string>
#include <vector>

#include "fssaudit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return fssaudit::run_cli(args, std::cout, std::cerr);
}
