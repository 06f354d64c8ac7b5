#include <iostream>

#include "kfol/cli.hpp"

int main(int argc, char** argv) {
  return kfol::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
