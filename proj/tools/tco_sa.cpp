#include "tco/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return tco::run_cli(argc, argv, std::cout, std::cerr); }
