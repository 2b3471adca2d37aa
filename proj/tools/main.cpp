#include <iostream>
#include <string>
#include <vector>

#include "socialsim/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return socialsim::dispatch(args, std::cout, std::cerr);
}
