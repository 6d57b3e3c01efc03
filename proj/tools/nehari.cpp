#include <iostream>

#include "nehari/cli_io.hpp"

int main(int argc, char** argv) { return nehari::run_cli(argc, argv, std::cout, std::cerr); }
