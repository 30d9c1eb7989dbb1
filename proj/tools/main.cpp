#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  return cxorder::cli::run_cli(argc, argv, std::cout, std::cerr);
}
