#include "tsolve/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return tsolve::run_command(argc, argv, std::cout, std::cerr); }
