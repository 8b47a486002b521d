#include <string>
#include <vector>

#include "maal/scenarios.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return maal::cli_run(args);
}
