#include <iostream>

#include "pseries/cli.hpp"

int main(int argc, char** argv) { return pseries::cli::run(argc, argv, std::cout, std::cerr); }
