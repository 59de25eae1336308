#include <iostream>

#include "hmaca/cli.hpp"

int main(int argc, char** argv) { return hmaca::cli::run(argc, argv, std::cout, std::cerr); }
