#include <iostream>

#include "diracgap/cli.hpp"

int main(int argc, char** argv) { return diracgap::cli::run(argc, argv, std::cout, std::cerr); }
