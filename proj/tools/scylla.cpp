#include <iostream>
#include <string>
#include <vector>

#include "scylla/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return scylla::run(args, std::cout, std::cerr);
}
