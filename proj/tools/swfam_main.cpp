#include "swfam/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return swfam::cli::run(argc, argv, std::cout, std::cerr);
}
