#include <iostream>

#include "ambistop/cli.hpp"

int main(int argc, char** argv) { return ambistop::run_cli(argc, argv, std::cout, std::cerr); }
