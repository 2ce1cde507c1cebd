#include <iostream>

#include "lrnls/cli.hpp"

int main(int argc, char** argv) { return lrnls::cli::parse_and_dispatch(argc, argv, std::cout, std::cerr); }
