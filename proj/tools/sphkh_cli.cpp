#include <iostream>

#include "sphkh/cli.hpp"

int main(int argc, char** argv) { return sphkh::cli_main(argc, argv, std::cout, std::cerr); }
