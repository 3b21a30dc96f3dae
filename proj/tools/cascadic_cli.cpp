#include <iostream>
#include <string>
#include <vector>

#include "cascadic/experiment.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cascadic::run_cli(args, std::cout, std::cerr);
}
