#include <vector>

#include <daahm/harness.hpp>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return daahm::run_command(args);
}
