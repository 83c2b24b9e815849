#include <iostream>
#include <string>
#include <vector>

#include "cirpeak/cli/run.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return cirpeak::cli::run(args, std::cout, std::cerr);
}
