#include <iostream>

#include "bemspectra/commands.hpp"

int main(int argc, char** argv) { return bemspectra::run_cli(argc, argv, std::cout, std::cerr); }
