#include <string>
#include <vector>

#include "rigidh/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rigidh::run_cli(args);
}
