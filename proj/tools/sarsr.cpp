#include <iostream>

#include "sarsr/cli.hpp"

int main(int argc, char** argv) { return sarsr::cli_main(argc, argv, std::cout, std::cerr); }
