#include "otmap/cli/commands.hpp"

int main(int argc, char** argv) {
  return otmap::cli::run_app(std::vector<std::string>(argv + 1, argv + argc));
}
