#include <iostream>

#include "bsderk/cli.hpp"

int main(int argc, char** argv) { return bsderk::cli::run(argc, argv, std::cout, std::cerr); }
