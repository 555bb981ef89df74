#include <iostream>
#include <string>
#include <vector>

#include "superosc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return superosc::run(args, std::cout, std::cerr);
}
