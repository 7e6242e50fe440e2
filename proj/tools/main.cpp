#include <vector>

#include "tactx/cli.hpp"

int main(int argc, char** argv) {
  return tactx::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
