#include <iostream>

#include "kemweb_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return kemweb::cli::run_cli(args, std::cout, std::cerr);
}
