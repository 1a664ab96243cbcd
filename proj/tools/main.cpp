#include <iostream>

#include "rescueplan/cli.hpp"

int main(int argc, char** argv) { return rescueplan::cli::run(argc, argv, std::cout, std::cerr); }
