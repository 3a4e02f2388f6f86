#include <iostream>

#include "nmlab/cli.hpp"

int main(int argc, char** argv) { return nmlab::cli_main(argc, argv, std::cout, std::cerr); }
