#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return spectral_slab::cli::run(argc, argv, std::cout, std::cerr); }
