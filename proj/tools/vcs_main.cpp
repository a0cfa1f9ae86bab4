#include <filesystem>
#include <iostream>

#include "vcs/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return vcs::run_cli(args, std::cout, std::cerr, std::filesystem::current_path());
}
