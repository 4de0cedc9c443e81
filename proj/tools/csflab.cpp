#include <iostream>
#include <string>
#include <vector>

#include "csflab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return csflab::cli::run(args, std::cout, std::cerr);
}
