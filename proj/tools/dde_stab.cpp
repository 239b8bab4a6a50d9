#include <iostream>

#include "ddestab/cli/commands.hpp"

int main(int argc, char** argv) { return ddestab::cli::run_cli(argc, argv, std::cout, std::cerr); }
