#include <iostream>

#include "skillmpc/io/commands.hpp"

int main(int argc, char** argv) {
  return skillmpc::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
