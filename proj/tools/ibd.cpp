#include <iostream>
#include <string>
#include <vector>

#include "ibd/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ibd::cli_main(args, std::cout, std::cerr);
}
