#include <iostream>

#include "lamlab/cli.hpp"

int main(int argc, char** argv) { return lamlab::run_cli(argc, argv, std::cout, std::cerr); }
