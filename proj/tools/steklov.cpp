#include <iostream>

#include "steklov/cli.hpp"

int main(int argc, char** argv) {
  return steklov::cli::run(argc, argv, std::cout, std::cerr);
}
