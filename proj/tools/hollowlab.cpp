#include <iostream>

#include "hollow/cli.hpp"

int main(int argc, char** argv) { return hollow::run_cli(argc, argv, std::cout, std::cerr); }
