#include <iostream>
#include <string>
#include <vector>

#include <ccpi/cli.hpp>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ccpi::cli::run(args, std::cout, std::cerr);
}
