#include <iostream>

#include "wld/cli.hpp"

int main(int argc, char** argv) { return wld::run_cli(argc, argv, std::cout, std::cerr); }
