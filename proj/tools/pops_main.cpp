#include <iostream>

#include "pops/cli.hpp"

int main(int argc, char** argv) { return pops::run_cli(argc, argv, std::cout, std::cerr); }
