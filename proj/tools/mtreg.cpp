#include <iostream>

#include "mtreg/cli.hpp"

int main(int argc, char** argv) { return mtreg::cli::run(argc, argv, std::cout, std::cerr); }
