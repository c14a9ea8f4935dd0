#include <iostream>

#include "mst/cli.hpp"

int main(int argc, char** argv) { return mst::cli::cli_main(argc, argv, std::cout, std::cerr); }
