#include <iostream>
#include <string>
#include <vector>

#include "folforge/cli.hpp"

int main(int argc, char** argv) {
  return folforge::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
