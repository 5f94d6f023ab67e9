#include <iostream>

#include "treealign/cli.hpp"

int main(int argc, char** argv) { return treealign::cli::run(argc, argv, std::cout, std::cerr); }
