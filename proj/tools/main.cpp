#include <iostream>

#include "ampcs/cli.hpp"

int main(int argc, char** argv) {
  return ampcs::cli::run(argc, argv, std::cout, std::cerr);
}
