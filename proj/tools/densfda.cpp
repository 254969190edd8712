#include <iostream>

#include "densfda/cli.hpp"

int main(int argc, char** argv) { return densfda::run_cli(argc, argv, std::cout, std::cerr); }
