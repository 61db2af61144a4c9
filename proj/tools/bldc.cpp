#include <iostream>
#include <string>
#include <vector>

#include "bldc/cli.hpp"

int main(int argc, char** argv) {
  return bldc::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
