#include <iostream>

#include "kwg/cli.hpp"

int main(int argc, char** argv) {
  return kwg::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
