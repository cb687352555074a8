#include <iostream>

#include "l1trend/cli.hpp"

int main(int argc, char** argv) { return l1trend::run_cli(argc, argv, std::cout, std::cerr); }
