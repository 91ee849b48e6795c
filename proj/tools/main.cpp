#include <iostream>

#include "arcsin_cli.hpp"

int main(int argc, char** argv) { return arcsin::cli::run(argc, argv, std::cout, std::cerr); }
