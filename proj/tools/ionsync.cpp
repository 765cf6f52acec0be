#include <iostream>

#include "ionsync/cli.hpp"

int main(int argc, char** argv) { return ionsync::run_cli(argc, argv, std::cout, std::cerr); }
