#include <iostream>
#include <string>
#include <vector>

#include "cachecast/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cachecast::run(std::move(args), std::cout, std::cerr);
}
