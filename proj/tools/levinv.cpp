#include <iostream>

#include "levinv/cli.hpp"

int main(int argc, char** argv) {
  return levinv::cli::run(argc, argv, std::cout, std::cerr);
}
